#pragma once

#include <span>

#include <Eigen/Dense>

#include "convforge/sequence.hpp"

namespace convforge {

/// The (in_dim + s) x in_dim matrix [w_{l-k}] whose action on a vector v of
/// length in_dim is convolution of the mask with v.
class ConvMatrix {
 public:
  /// Throws MaskTooLong when deg(mask) > s, InvalidArgument when in_dim < 1 or s < 0.
  ConvMatrix(FiniteSequence mask, int in_dim, int s);

  const FiniteSequence& mask() const noexcept { return mask_; }
  int in_dim() const noexcept { return static_cast<int>(entries_.cols()); }
  int out_dim() const noexcept { return static_cast<int>(entries_.rows()); }
  int s() const noexcept { return s_; }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return entries_ * v; }

 private:
  FiniteSequence mask_;
  int s_;
  Eigen::MatrixXd entries_;
};

inline ConvMatrix toeplitz(const FiniteSequence& mask, int in_dim, int s) {
  return ConvMatrix(mask, in_dim, s);
}

/// The d_J x d matrix T^W = [W_{l-k}].
///
/// In 1-based terms, row l and column k (l = 1..d_J, k = 1..d) hold W_{l-k};
/// storage is 0-based, and since the shift cancels in l - k the stored entry
/// (r, c) is W[r - c]. Row (k+1)d of a stacked direction sequence therefore
/// lands at storage row (k+1)d - 1.
Eigen::MatrixXd big_toeplitz(const FiniteSequence& W, int d, int d_J);

/// T^(J) ... T^(1) for masks ordered w^(1) first, with widths d_j = d + j s.
/// Throws MaskTooLong if any mask has degree above s.
Eigen::MatrixXd matrix_chain_product(std::span<const FiniteSequence> masks, int d, int s);

}  // namespace convforge
