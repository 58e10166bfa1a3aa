#include "convforge/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convforge/errors.hpp"

namespace convforge {

FiniteSequence::FiniteSequence(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

FiniteSequence::FiniteSequence(std::vector<double> coeffs, int support_hint)
    : FiniteSequence(std::move(coeffs)) {
  if (support_hint < 0) throw InvalidArgument("support_hint must be non-negative");
  if (degree() > support_hint) {
    throw InvalidArgument("sequence of degree " + std::to_string(degree()) +
                          " does not fit declared support " + std::to_string(support_hint));
  }
  coeffs_.resize(static_cast<std::size_t>(support_hint) + 1, 0.0);
}

int FiniteSequence::degree() const noexcept {
  for (int k = support_hint(); k >= 0; --k) {
    if (coeffs_[static_cast<std::size_t>(k)] != 0.0) return k;
  }
  return -1;
}

double FiniteSequence::max_abs() const noexcept {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

FiniteSequence FiniteSequence::trimmed() const {
  const int m = std::max(degree(), 0);
  return FiniteSequence(std::vector<double>(coeffs_.begin(), coeffs_.begin() + m + 1));
}

FiniteSequence convolve(const FiniteSequence& a, const FiniteSequence& b) {
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  std::vector<double> out(ac.size() + bc.size() - 1, 0.0);
  for (std::size_t k = 0; k < bc.size(); ++k) {
    if (bc[k] == 0.0) continue;
    for (std::size_t i = 0; i < ac.size(); ++i) out[i + k] += ac[i] * bc[k];
  }
  return FiniteSequence(std::move(out));
}

FiniteSequence convolve_all(std::span<const FiniteSequence> seqs) {
  FiniteSequence acc = FiniteSequence::delta();
  for (const auto& s : seqs) acc = convolve(s, acc);
  return acc;
}

double l1_norm(const FiniteSequence& seq) noexcept {
  double sum = 0.0;
  for (double c : seq.coeffs()) sum += std::abs(c);
  return sum;
}

}  // namespace convforge
