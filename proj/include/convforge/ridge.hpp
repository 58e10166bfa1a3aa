#pragma once

#include <vector>

#include <Eigen/Dense>

namespace convforge {

struct RidgeTerm {
  double beta = 0.0;        // in [-1, 1]
  Eigen::VectorXd alpha;    // ||alpha||_1 == 1
  double t = 0.0;           // in [0, 1]
};

/// F_m(x) = beta0 + alpha0 . x + (v/m) sum_k beta_k (alpha_k . x - t_k)_+
struct RidgeExpansion {
  double beta0 = 0.0;
  Eigen::VectorXd alpha0;
  double v = 0.0;
  std::vector<RidgeTerm> terms;

  int d() const noexcept { return static_cast<int>(alpha0.size()); }
  int m() const noexcept { return static_cast<int>(terms.size()); }

  double operator()(const Eigen::VectorXd& x) const;

  /// Throws DimensionMismatch / InvalidArgument when a term breaks the
  /// ||alpha_k||_1 = 1 (to 1e-10), beta_k in [-1,1] or t_k in [0,1] rules.
  void validate() const;
};

inline double ramp(double u) noexcept { return u > 0.0 ? u : 0.0; }

}  // namespace convforge
