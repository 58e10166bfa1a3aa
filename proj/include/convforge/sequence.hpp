#pragma once

#include <span>
#include <vector>

namespace convforge {

/// A real sequence supported in {0, ..., support_hint}.
///
/// Storage always holds support_hint + 1 coefficients; index k holds the
/// value at sequence position k. The effective degree is the largest index
/// holding a nonzero value (-1 for the zero sequence), which may be smaller
/// than the declared support.
class FiniteSequence {
 public:
  /// The zero sequence supported in {0}.
  FiniteSequence() : coeffs_(1, 0.0) {}

  /// Declared support is coeffs.size() - 1. An empty list becomes {0}.
  explicit FiniteSequence(std::vector<double> coeffs);

  /// Pads with zeros up to support_hint; throws InvalidArgument when the
  /// effective degree of coeffs exceeds support_hint.
  FiniteSequence(std::vector<double> coeffs, int support_hint);

  FiniteSequence(std::initializer_list<double> coeffs)
      : FiniteSequence(std::vector<double>(coeffs)) {}

  static FiniteSequence delta() { return FiniteSequence({1.0}); }
  static FiniteSequence zero(int support_hint) {
    return FiniteSequence(std::vector<double>(static_cast<std::size_t>(support_hint) + 1, 0.0));
  }

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  int support_hint() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  int degree() const noexcept;
  bool is_zero() const noexcept { return degree() < 0; }

  /// Value at position k; zero outside the declared support (including k < 0).
  double operator[](int k) const noexcept {
    return (k < 0 || k > support_hint()) ? 0.0 : coeffs_[static_cast<std::size_t>(k)];
  }

  /// Largest absolute coefficient.
  double max_abs() const noexcept;

  /// Copy with the declared support shrunk to the effective degree ({0} for zero).
  FiniteSequence trimmed() const;

  friend bool operator==(const FiniteSequence&, const FiniteSequence&) = default;

 private:
  std::vector<double> coeffs_;
};

/// (a*b)_i = sum_k a_{i-k} b_k. Declared support of the result is the sum of
/// the declared supports.
FiniteSequence convolve(const FiniteSequence& a, const FiniteSequence& b);

/// w^(n) * ... * w^(1); the delta sequence for an empty list.
FiniteSequence convolve_all(std::span<const FiniteSequence> seqs);

double l1_norm(const FiniteSequence& seq) noexcept;

}  // namespace convforge
