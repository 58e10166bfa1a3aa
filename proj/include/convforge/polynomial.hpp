#pragma once

#include <complex>
#include <span>
#include <vector>

#include "convforge/sequence.hpp"

namespace convforge {

/// Polynomial with real coefficients; coeffs[k] multiplies z^k, the same
/// layout as FiniteSequence.
class RealPolynomial {
 public:
  RealPolynomial() : coeffs_(1, 0.0) {}
  explicit RealPolynomial(std::vector<double> coeffs);

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  double leading() const noexcept { return coeffs_.back(); }

  std::complex<double> operator()(std::complex<double> z) const noexcept;
  double operator()(double x) const noexcept;

  friend RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b);

 private:
  std::vector<double> coeffs_;  // trailing zeros stripped; {0} for zero
};

/// Coefficient-identical view of a sequence as the polynomial sum_k W_k z^k.
RealPolynomial symbol_of(const FiniteSequence& seq);

FiniteSequence to_sequence(const RealPolynomial& p);

struct RealRoot {
  double value = 0.0;
  int multiplicity = 1;
};

/// Conjugate pair x +/- i y with y > 0.
struct ConjugatePair {
  double x = 0.0;
  double y = 0.0;
  int multiplicity = 1;

  /// z^2 - 2x z + (x^2 + y^2)
  RealPolynomial quadratic() const;
};

struct RootMultiset {
  std::vector<RealRoot> real_roots;
  std::vector<ConjugatePair> conjugate_pairs;
  double leading = 1.0;

  /// Pairs count twice.
  int degree() const noexcept;

  /// leading * prod (z - x_k) * prod (z^2 - 2x z + x^2 + y^2).
  RealPolynomial expand() const;
};

struct RootFinderOptions {
  int max_iterations = 500;
  /// A root is classified real when |imag| <= pairing_tolerance * (1 + |root|).
  double pairing_tolerance = 1e-8;
};

/// All complex roots of p, real ones and conjugate pairs separated.
///
/// Simultaneous Aberth iteration on the coefficient list, started from
/// circles whose radii follow the Newton polygon of |coeffs|, then Newton
/// polishing and merging of root clusters into multiple roots. Exact zero
/// roots are deflated before iterating.
///
/// Throws InvalidArgument for the zero polynomial and DidNotConverge when the
/// expanded roots do not reproduce p to relative tolerance tol.
RootMultiset find_roots(const RealPolynomial& p, double tol, const RootFinderOptions& opts = {});

/// Raw complex roots, without classification or multiplicity detection.
std::vector<std::complex<double>> aberth_roots(std::span<const double> coeffs, int max_iterations);

}  // namespace convforge
