#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "convforge/network.hpp"
#include "convforge/ridge.hpp"

namespace convforge {

/// A deterministic black-box function on [-1,1]^d plus a descriptor.
struct TargetFunction {
  std::string name;
  std::map<std::string, double> params;
  std::function<double(const Eigen::VectorXd&)> evaluator;

  double operator()(const Eigen::VectorXd& x) const { return evaluator(x); }
};

/// Named presets:
///   gaussian      exp(-||x||^2 / (2 width^2)), width = 0.5
///   quadratic     ||x||^2 / d
///   cosine-ridge  cos(frequency * pi * (x_1 + ... + x_d) / d), frequency = 1
///   linear        offset + slope * (x_1 + ... + x_d) / d, offset = 0.25, slope = 1
///   ramp          offset + (x_1 - threshold)_+, offset = 0.25, threshold = 0.3
/// Unknown names and parameters throw InvalidArgument.
TargetFunction make_target(const std::string& name, int d,
                           const std::map<std::string, double>& params = {});

struct GridSpec {
  enum class Kind { Tensor, LatinHypercube };
  Kind kind = Kind::LatinHypercube;
  int points_per_axis = 33;  // Tensor
  int samples = 4096;        // LatinHypercube
  std::uint64_t seed = 0;    // LatinHypercube

  static GridSpec tensor(int points_per_axis) { return {Kind::Tensor, points_per_axis, 0, 0}; }
  static GridSpec latin_hypercube(int samples, std::uint64_t seed) {
    return {Kind::LatinHypercube, 0, samples, seed};
  }
  std::string describe() const;
};

/// Points of the grid inside [-1,1]^d.
std::vector<Eigen::VectorXd> grid_points(const GridSpec& grid, int d);

/// max over the grid of |f(x) - g(x)|, evaluated on up to `threads` threads.
double sup_error(const std::function<double(const Eigen::VectorXd&)>& f,
                 const std::function<double(const Eigen::VectorXd&)>& g, const GridSpec& grid,
                 int d, int threads = 1);
double sup_error(const TargetFunction& f, const DeepCnn& net, const GridSpec& grid,
                 int threads = 1);

struct FitOptions {
  int candidate_pool = 512;
  int lm_max_evaluations = 400;
  double gradient_step = 1e-5;
};

/// Ridge expansion approximating the target on [-1,1]^d.
///
/// beta0 = target(0) and alpha0 = central-difference gradient at 0. The m
/// ramp terms come from a seeded pool of candidates (directions uniform on
/// the l1 sphere, thresholds uniform in [0,1]) by greedy orthogonal matching
/// pursuit on a training grid, then a joint Levenberg-Marquardt refinement of
/// directions, thresholds and weights. The result is normalized to the
/// ||alpha_k||_1 = 1, t_k in [0,1], beta_k in [-1,1] form with the weight
/// magnitude folded into v.
RidgeExpansion fit_ridge(const TargetFunction& target, int d, int m, std::uint64_t seed,
                         const FitOptions& opts = {});

struct ErrorReport {
  int J = 0;
  int m = 0;
  double sup_error = 0.0;
  std::string grid;
  long long param_count = 0;
};

struct RateStudyOptions {
  /// Error grid; its seed is replaced by one derived from the study seed.
  int samples = 4096;
  double domain_bound = 1.0;
  int threads = 1;
  FitOptions fit;
};

/// m = floor((s-1) J / d) - 1, the largest m with (m+1) d <= J (s-1).
/// Throws DepthTooSmall when that m is negative.
int ridge_terms_for_depth(int d, int s, int J);

/// For each J: fit a ridge expansion with m(J) terms, build the depth-J
/// network, and measure its sup error against the target.
std::vector<ErrorReport> rate_study(const TargetFunction& target, int d, int s,
                                    std::span<const int> depths, std::uint64_t seed,
                                    const RateStudyOptions& opts = {});

/// Least-squares slope of log(error) against log(J).
double log_log_slope(std::span<const ErrorReport> rows);

}  // namespace convforge
