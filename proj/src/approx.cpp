#include "convforge/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "convforge/errors.hpp"
#include "rng.hpp"

namespace convforge {

namespace {

using detail::Rng;

// Uniform on the l1 unit sphere: normalized exponential magnitudes, random signs.
Eigen::VectorXd l1_sphere_direction(Rng& rng, int d) {
  Eigen::VectorXd a(d);
  for (int i = 0; i < d; ++i) a[i] = rng.exponential();
  a /= a.sum();
  for (int i = 0; i < d; ++i) {
    if (rng.uniform() < 0.5) a[i] = -a[i];
  }
  return a;
}

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

// Residuals sum_k gamma_k (a_k.x_i - tau_k^2)_+ - y_i with layout
// [a_k (d), tau_k, gamma_k] per term.
struct RampFunctor : Eigen::DenseFunctor<double> {
  RampFunctor(const Eigen::MatrixXd& points, const Eigen::VectorXd& targets, int terms)
      : Eigen::DenseFunctor<double>(terms * (static_cast<int>(points.cols()) + 2),
                                    static_cast<int>(points.rows())),
        x(points),
        y(targets),
        m(terms),
        d(static_cast<int>(points.cols())) {}

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    r = -y;
    for (int k = 0; k < m; ++k) {
      const int o = k * (d + 2);
      const double tau = p[o + d];
      const Eigen::VectorXd u = x * p.segment(o, d) - Eigen::VectorXd::Constant(x.rows(), tau * tau);
      r += p[o + d + 1] * u.cwiseMax(0.0);
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
    jac.setZero(x.rows(), m * (d + 2));
    for (int k = 0; k < m; ++k) {
      const int o = k * (d + 2);
      const double tau = p[o + d];
      const double gamma = p[o + d + 1];
      const Eigen::VectorXd u = x * p.segment(o, d) - Eigen::VectorXd::Constant(x.rows(), tau * tau);
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (u[i] <= 0.0) continue;
        jac.block(i, o, 1, d) = gamma * x.row(i);
        jac(i, o + d) = -2.0 * tau * gamma;
        jac(i, o + d + 1) = u[i];
      }
    }
    return 0;
  }

  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& y;
  int m;
  int d;
};

Eigen::MatrixXd training_points(int d, std::uint64_t seed) {
  const GridSpec grid = d <= 2 ? GridSpec::tensor(41) : GridSpec::latin_hypercube(4096, seed);
  const auto pts = grid_points(grid, d);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(pts.size()), d);
  for (std::size_t i = 0; i < pts.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = pts[i];
  return x;
}

}  // namespace

TargetFunction make_target(const std::string& name, int d,
                           const std::map<std::string, double>& params) {
  if (d < 1) throw InvalidArgument("target dimension must be at least 1");
  const auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : params) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        throw InvalidArgument("target '" + name + "' has no parameter '" + key + "'");
      }
    }
  };
  TargetFunction f;
  f.name = name;
  const double dd = d;
  if (name == "gaussian") {
    allow({"width"});
    const double width = get_param(params, "width", 0.5);
    f.params = {{"width", width}};
    f.evaluator = [width](const Eigen::VectorXd& x) {
      return std::exp(-x.squaredNorm() / (2.0 * width * width));
    };
  } else if (name == "quadratic") {
    allow({});
    f.evaluator = [dd](const Eigen::VectorXd& x) { return x.squaredNorm() / dd; };
  } else if (name == "cosine-ridge") {
    allow({"frequency"});
    const double freq = get_param(params, "frequency", 1.0);
    f.params = {{"frequency", freq}};
    f.evaluator = [freq, dd](const Eigen::VectorXd& x) {
      return std::cos(freq * std::numbers::pi * x.sum() / dd);
    };
  } else if (name == "linear") {
    allow({"offset", "slope"});
    const double offset = get_param(params, "offset", 0.25);
    const double slope = get_param(params, "slope", 1.0);
    f.params = {{"offset", offset}, {"slope", slope}};
    f.evaluator = [offset, slope, dd](const Eigen::VectorXd& x) {
      return offset + slope * x.sum() / dd;
    };
  } else if (name == "ramp") {
    allow({"offset", "threshold"});
    const double offset = get_param(params, "offset", 0.25);
    const double threshold = get_param(params, "threshold", 0.3);
    f.params = {{"offset", offset}, {"threshold", threshold}};
    f.evaluator = [offset, threshold](const Eigen::VectorXd& x) {
      return offset + ramp(x[0] - threshold);
    };
  } else {
    throw InvalidArgument("unknown target '" + name + "'");
  }
  return f;
}

std::string GridSpec::describe() const {
  std::ostringstream out;
  if (kind == Kind::Tensor) {
    out << "tensor:" << points_per_axis;
  } else {
    out << "lhs:" << samples << ":seed=" << seed;
  }
  return out.str();
}

std::vector<Eigen::VectorXd> grid_points(const GridSpec& grid, int d) {
  if (d < 1) throw InvalidArgument("grid dimension must be at least 1");
  std::vector<Eigen::VectorXd> pts;
  if (grid.kind == GridSpec::Kind::Tensor) {
    const int n = grid.points_per_axis;
    if (n < 1) throw InvalidArgument("tensor grid needs at least one point per axis");
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    pts.reserve(total);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t p = 0; p < total; ++p) {
      Eigen::VectorXd x(d);
      for (int i = 0; i < d; ++i) x[i] = n == 1 ? 0.0 : -1.0 + 2.0 * idx[i] / (n - 1);
      pts.push_back(std::move(x));
      for (int i = 0; i < d && ++idx[i] == n; ++i) idx[i] = 0;
    }
    return pts;
  }

  const int n = grid.samples;
  if (n < 1) throw InvalidArgument("latin hypercube needs at least one sample");
  Rng rng(grid.seed);
  pts.assign(static_cast<std::size_t>(n), Eigen::VectorXd(d));
  std::vector<std::size_t> strata(static_cast<std::size_t>(n));
  for (int i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < strata.size(); ++k) strata[k] = k;
    for (std::size_t k = strata.size(); k > 1; --k) std::swap(strata[k - 1], strata[rng.below(k)]);
    for (std::size_t k = 0; k < strata.size(); ++k) {
      pts[k][i] = -1.0 + 2.0 * (static_cast<double>(strata[k]) + rng.uniform()) / n;
    }
  }
  return pts;
}

double sup_error(const std::function<double(const Eigen::VectorXd&)>& f,
                 const std::function<double(const Eigen::VectorXd&)>& g, const GridSpec& grid,
                 int d, int threads) {
  const auto pts = grid_points(grid, d);
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, pts.size());
  std::vector<double> worst(workers, 0.0);
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < pts.size(); i += workers) {
      const double e = std::abs(f(pts[i]) - g(pts[i]));
      // NaN propagates as an infinite error
      worst[w] = std::isnan(e) ? std::numeric_limits<double>::infinity() : std::max(worst[w], e);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  return *std::max_element(worst.begin(), worst.end());
}

double sup_error(const TargetFunction& f, const DeepCnn& net, const GridSpec& grid, int threads) {
  return sup_error(
      f.evaluator, [&net](const Eigen::VectorXd& x) { return evaluate(net, x); }, grid,
      net.config().d, threads);
}

RidgeExpansion fit_ridge(const TargetFunction& target, int d, int m, std::uint64_t seed,
                         const FitOptions& opts) {
  if (d < 1) throw InvalidArgument("d must be at least 1");
  if (m < 0) throw InvalidArgument("m must be non-negative");

  RidgeExpansion ridge;
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(d);
  ridge.beta0 = target(origin);
  ridge.alpha0.resize(d);
  const double h = opts.gradient_step;
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd up = origin;
    Eigen::VectorXd down = origin;
    up[i] = h;
    down[i] = -h;
    ridge.alpha0[i] = (target(up) - target(down)) / (2.0 * h);
  }
  if (m == 0) return ridge;

  const Eigen::MatrixXd x = training_points(d, seed ^ 0x9e3779b97f4a7c15ULL);
  const Eigen::Index n = x.rows();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    y[i] = target(xi) - ridge.beta0 - ridge.alpha0.dot(xi);
  }

  // Candidate pool; its draws depend only on the seed, so pools for
  // different m coincide and the greedy selections are nested.
  Rng rng(seed);
  const int pool = std::max(opts.candidate_pool, m);
  std::vector<Eigen::VectorXd> dirs;
  std::vector<double> thresholds;
  Eigen::MatrixXd features(n, pool);
  for (int c = 0; c < pool; ++c) {
    dirs.push_back(l1_sphere_direction(rng, d));
    thresholds.push_back(rng.uniform());
    features.col(c) = (x * dirs.back()).array() - thresholds.back();
    features.col(c) = features.col(c).cwiseMax(0.0);
  }
  const Eigen::VectorXd norms = features.colwise().norm();

  std::vector<int> chosen;
  std::vector<bool> used(static_cast<std::size_t>(pool), false);
  Eigen::VectorXd residual = y;
  Eigen::VectorXd weights;
  for (int step = 0; step < m; ++step) {
    int best = -1;
    double best_score = -1.0;
    for (int c = 0; c < pool; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double score = norms[c] > 0.0 ? std::abs(features.col(c).dot(residual)) / norms[c] : 0.0;
      if (score > best_score) {
        best = c;
        best_score = score;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    chosen.push_back(best);
    Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(chosen.size()));
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      sub.col(static_cast<Eigen::Index>(k)) = features.col(chosen[k]);
    }
    weights = sub.colPivHouseholderQr().solve(y);
    residual = y - sub * weights;
  }

  Eigen::VectorXd params(m * (d + 2));
  for (int k = 0; k < m; ++k) {
    const int o = k * (d + 2);
    params.segment(o, d) = dirs[static_cast<std::size_t>(chosen[static_cast<std::size_t>(k)])];
    params[o + d] = std::sqrt(thresholds[static_cast<std::size_t>(chosen[static_cast<std::size_t>(k)])]);
    params[o + d + 1] = weights[k];
  }

  RampFunctor functor(x, y, m);
  Eigen::VectorXd before;
  functor(params, before);
  Eigen::VectorXd refined = params;
  Eigen::LevenbergMarquardt<RampFunctor> lm(functor);
  lm.setMaxfev(opts.lm_max_evaluations);
  lm.minimize(refined);
  Eigen::VectorXd after;
  functor(refined, after);
  if (refined.allFinite() && after.squaredNorm() < before.squaredNorm()) params = refined;

  // Normalize to ||alpha||_1 = 1 and clamp t to [0,1]; a ramp with t >= 1
  // never fires on [-1,1]^d, so clamping there leaves the function unchanged.
  std::vector<double> gammas(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const int o = k * (d + 2);
    Eigen::VectorXd a = params.segment(o, d);
    const double tau = params[o + d];
    double gamma = params[o + d + 1];
    const double scale = a.lpNorm<1>();
    RidgeTerm term;
    if (scale > 0.0) {
      term.alpha = a / scale;
      term.t = std::clamp(tau * tau / scale, 0.0, 1.0);
      gamma *= scale;
    } else {
      term.alpha = Eigen::VectorXd::Unit(d, 0);
      term.t = 1.0;
      gamma = 0.0;
    }
    gammas[static_cast<std::size_t>(k)] = gamma;
    ridge.terms.push_back(std::move(term));
  }
  double peak = 0.0;
  for (double g : gammas) peak = std::max(peak, std::abs(g));
  ridge.v = peak * m;
  for (int k = 0; k < m; ++k) {
    ridge.terms[static_cast<std::size_t>(k)].beta = peak > 0.0 ? gammas[static_cast<std::size_t>(k)] / peak : 0.0;
  }
  return ridge;
}

int ridge_terms_for_depth(int d, int s, int J) {
  if (s < 2) throw InvalidArgument("s must be ≥ 2");
  if (d < 1) throw InvalidArgument("d must be at least 1");
  const int m = (s - 1) * J / d - 1;
  if (m < 0) throw DepthTooSmall(J, minimal_depth(d, s, 0));
  return m;
}

std::vector<ErrorReport> rate_study(const TargetFunction& target, int d, int s,
                                    std::span<const int> depths, std::uint64_t seed,
                                    const RateStudyOptions& opts) {
  const GridSpec grid = GridSpec::latin_hypercube(opts.samples, seed ^ 0x5851f42d4c957f2dULL);
  std::vector<ErrorReport> rows;
  for (int J : depths) {
    const int m = ridge_terms_for_depth(d, s, J);
    const RidgeExpansion ridge = fit_ridge(target, d, m, seed, opts.fit);
    const DeepCnn net = build_network(ridge, s, J, opts.domain_bound);
    ErrorReport row;
    row.J = J;
    row.m = m;
    row.sup_error = sup_error(target, net, grid, opts.threads);
    row.grid = grid.describe();
    row.param_count = count_free_parameters(net);
    rows.push_back(std::move(row));
  }
  return rows;
}

double log_log_slope(std::span<const ErrorReport> rows) {
  if (rows.size() < 2) throw InvalidArgument("slope needs at least two rows");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double lx = std::log(static_cast<double>(r.J));
    const double ly = std::log(r.sup_error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace convforge
