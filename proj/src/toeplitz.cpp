#include "convforge/toeplitz.hpp"

#include <algorithm>
#include <string>

#include "convforge/errors.hpp"

namespace convforge {

ConvMatrix::ConvMatrix(FiniteSequence mask, int in_dim, int s) : mask_(std::move(mask)), s_(s) {
  if (in_dim < 1) throw InvalidArgument("in_dim must be at least 1");
  if (s < 0) throw InvalidArgument("s must be non-negative");
  if (mask_.degree() > s) throw MaskTooLong(mask_.degree(), s);

  entries_ = Eigen::MatrixXd::Zero(in_dim + s, in_dim);
  const int taps = std::max(mask_.degree(), 0);
  for (int k = 0; k < in_dim; ++k) {
    for (int i = 0; i <= taps; ++i) entries_(k + i, k) = mask_[i];
  }
}

Eigen::MatrixXd big_toeplitz(const FiniteSequence& W, int d, int d_J) {
  if (d < 1) throw InvalidArgument("d must be at least 1");
  if (d_J < d) {
    throw DimensionMismatch("d_J=" + std::to_string(d_J) + " is smaller than d=" +
                            std::to_string(d));
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d_J, d);
  for (int r = 0; r < d_J; ++r) {
    for (int c = 0; c < d && c <= r; ++c) t(r, c) = W[r - c];
  }
  return t;
}

Eigen::MatrixXd matrix_chain_product(std::span<const FiniteSequence> masks, int d, int s) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(d, d);
  int width = d;
  for (const auto& mask : masks) {
    ConvMatrix t(mask, width, s);
    acc = t.entries() * acc;
    width += s;
  }
  return acc;
}

}  // namespace convforge
