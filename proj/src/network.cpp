#include "convforge/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convforge/errors.hpp"
#include "convforge/factorize.hpp"

namespace convforge {

std::vector<int> NetworkConfig::widths() const {
  std::vector<int> w;
  for (int j = 0; j <= J; ++j) w.push_back(width(j));
  return w;
}

bool has_repeated_middle(const Eigen::VectorXd& entries, int s, double tol) {
  const Eigen::Index n = entries.size();
  if (n - 2 * s <= 1) return true;
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  const double shared = entries[s];
  for (Eigen::Index i = s + 1; i < n - s; ++i) {
    if (std::abs(entries[i] - shared) > tol * scale) return false;
  }
  return true;
}

DeepCnn::DeepCnn(NetworkConfig config, std::vector<Layer> layers, Eigen::VectorXd output_coeffs,
                 std::vector<double> bound_ledger)
    : config_(config),
      layers_(std::move(layers)),
      output_coeffs_(std::move(output_coeffs)),
      bound_ledger_(std::move(bound_ledger)) {
  if (config_.d < 1 || config_.s < 1 || config_.J < 1) {
    throw InvalidArgument("network config needs d >= 1, s >= 1 and J >= 1");
  }
  if (static_cast<int>(layers_.size()) != config_.J) {
    throw DimensionMismatch("expected " + std::to_string(config_.J) + " layers, got " +
                            std::to_string(layers_.size()));
  }
  if (static_cast<int>(bound_ledger_.size()) != config_.J + 1) {
    throw DimensionMismatch("bound ledger must hold B^(0..J)");
  }
  if (output_coeffs_.size() != config_.width(config_.J)) {
    throw DimensionMismatch("output coefficients must have d_J=" +
                            std::to_string(config_.width(config_.J)) + " entries");
  }
  transforms_.reserve(layers_.size());
  for (int j = 1; j <= config_.J; ++j) {
    const Layer& layer = layers_[static_cast<std::size_t>(j - 1)];
    if (layer.bias.entries.size() != config_.width(j)) {
      throw DimensionMismatch("bias of layer " + std::to_string(j) + " must have d_j=" +
                              std::to_string(config_.width(j)) + " entries");
    }
    transforms_.emplace_back(layer.mask, config_.width(j - 1), config_.s);
    const double expected = l1_norm(layer.mask) * bound_ledger_[static_cast<std::size_t>(j - 1)];
    const double got = bound_ledger_[static_cast<std::size_t>(j)];
    if (std::abs(got - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
      throw InvalidArgument("bound ledger entry B^(" + std::to_string(j) +
                            ") is not ||w^(j)||_1 B^(j-1)");
    }
  }
}

std::vector<FiniteSequence> DeepCnn::masks() const {
  std::vector<FiniteSequence> out;
  out.reserve(layers_.size());
  for (const auto& layer : layers_) out.push_back(layer.mask);
  return out;
}

ForwardPass forward(const DeepCnn& net, const Eigen::VectorXd& x) {
  if (x.size() != net.config().d) {
    throw DimensionMismatch("input has " + std::to_string(x.size()) + " components, expected " +
                            std::to_string(net.config().d));
  }
  ForwardPass pass;
  pass.activations.reserve(static_cast<std::size_t>(net.config().J) + 1);
  pass.activations.push_back(x);
  for (int j = 1; j <= net.config().J; ++j) {
    const auto& bias = net.layers()[static_cast<std::size_t>(j - 1)].bias.entries;
    pass.activations.push_back(
        (net.transform(j).entries() * pass.activations.back() - bias).cwiseMax(0.0));
  }
  pass.output = net.output_coeffs().dot(pass.activations.back());
  return pass;
}

double evaluate(const DeepCnn& net, const Eigen::VectorXd& x) {
  if (x.size() != net.config().d) {
    throw DimensionMismatch("input has " + std::to_string(x.size()) + " components, expected " +
                            std::to_string(net.config().d));
  }
  Eigen::VectorXd h = x;
  for (int j = 1; j <= net.config().J; ++j) {
    const auto& bias = net.layers()[static_cast<std::size_t>(j - 1)].bias.entries;
    h = (net.transform(j).entries() * h - bias).cwiseMax(0.0);
  }
  return net.output_coeffs().dot(h);
}

FiniteSequence stack_ridge_directions(const RidgeExpansion& ridge) {
  const int d = ridge.d();
  if (d < 1) throw DimensionMismatch("alpha0 must have at least one component");
  std::vector<const Eigen::VectorXd*> directions{&ridge.alpha0};
  for (const auto& term : ridge.terms) {
    if (term.alpha.size() != d) {
      throw DimensionMismatch("every ridge direction must have d=" + std::to_string(d) +
                              " components");
    }
    directions.push_back(&term.alpha);
  }
  std::vector<double> W(directions.size() * static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < directions.size(); ++k) {
    for (int i = 0; i < d; ++i) W[k * d + i] = (*directions[k])[d - 1 - i];
  }
  return FiniteSequence(std::move(W));
}

std::vector<double> bound_ledger(std::span<const FiniteSequence> masks, double domain_bound) {
  std::vector<double> ledger{domain_bound};
  for (const auto& mask : masks) ledger.push_back(l1_norm(mask) * ledger.back());
  return ledger;
}

std::vector<BiasVector> build_biases(std::span<const FiniteSequence> masks,
                                     const RidgeExpansion& ridge, double domain_bound,
                                     const NetworkConfig& config) {
  const int J = config.J;
  const int d = config.d;
  if (static_cast<int>(masks.size()) != J) {
    throw DimensionMismatch("build_biases needs exactly J=" + std::to_string(J) + " masks");
  }
  if ((ridge.m() + 1) * d > config.width(J) - 1) {
    throw DimensionMismatch("last layer is too narrow for " + std::to_string(ridge.m()) +
                            " ridge terms");
  }
  const std::vector<double> B = bound_ledger(masks, domain_bound);

  std::vector<BiasVector> biases;
  biases.reserve(static_cast<std::size_t>(J));
  for (int j = 1; j <= J; ++j) {
    const ConvMatrix t(masks[static_cast<std::size_t>(j - 1)], config.width(j - 1), config.s);
    // h^(0) = x carries no offset; deeper inputs carry B^(j-1) on every component.
    const double carried = j == 1 ? 0.0 : B[static_cast<std::size_t>(j - 1)];
    const Eigen::VectorXd shifted =
        carried * (t.entries() * Eigen::VectorXd::Ones(config.width(j - 1)));
    const double Bj = B[static_cast<std::size_t>(j)];

    BiasVector bias;
    if (j < J) {
      bias.entries = shifted.array() - Bj;
      bias.structured = true;
    } else {
      bias.entries = shifted.array() + Bj;
      bias.entries[d - 1] = shifted[d - 1] - Bj;
      bias.entries[d + J * config.s - 1] = shifted[d + J * config.s - 1] - Bj;
      for (int k = 1; k <= ridge.m(); ++k) {
        const int row = (k + 1) * d - 1;
        bias.entries[row] = shifted[row] + ridge.terms[static_cast<std::size_t>(k - 1)].t;
      }
    }
    biases.push_back(std::move(bias));
  }
  return biases;
}

Eigen::VectorXd realize_output_coeffs(const NetworkConfig& config, double final_bound,
                                      const RidgeExpansion& ridge) {
  if (final_bound == 0.0) throw DegenerateScale();
  const int d = config.d;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(config.width(config.J));
  c[d - 1] = 1.0;
  const int m = ridge.m();
  for (int k = 1; k <= m; ++k) {
    c[(k + 1) * d - 1] = ridge.v * ridge.terms[static_cast<std::size_t>(k - 1)].beta / m;
  }
  c[d + config.J * config.s - 1] = ridge.beta0 / final_bound - 1.0;
  return c;
}

Eigen::VectorXd realize_output_coeffs(const DeepCnn& net, const RidgeExpansion& ridge) {
  return realize_output_coeffs(net.config(), net.bound_ledger().back(), ridge);
}

int minimal_depth(int d, int s, int m) {
  if (s < 2) throw InvalidArgument("s must be ≥ 2");
  const int need = (m + 1) * d;
  return (need + s - 2) / (s - 1);
}

DeepCnn build_network(const RidgeExpansion& ridge, int s, int J, double domain_bound,
                      const BuildOptions& opts) {
  ridge.validate();
  const int d = ridge.d();
  if (s < 2) throw InvalidArgument("s must be ≥ 2");
  if (s > d) {
    throw InvalidArgument("s=" + std::to_string(s) + " must not exceed the input dimension d=" +
                          std::to_string(d));
  }
  if (!(domain_bound > 0.0)) throw InvalidArgument("domain bound must be positive");
  const int minimal = minimal_depth(d, s, ridge.m());
  if (J < minimal) throw DepthTooSmall(J, minimal);

  const FiniteSequence W = stack_ridge_directions(ridge);
  if (W.is_zero()) throw DegenerateScale();

  const FactorizationResult factors = factorize_mask(W, s, opts.factor_tolerance);
  const std::vector<FiniteSequence> masks = pad_with_deltas(factors.masks, J);

  const NetworkConfig config{d, s, J};
  std::vector<double> ledger = bound_ledger(masks, domain_bound);
  std::vector<BiasVector> biases = build_biases(masks, ridge, domain_bound, config);
  Eigen::VectorXd c = realize_output_coeffs(config, ledger.back(), ridge);

  std::vector<Layer> layers;
  layers.reserve(masks.size());
  for (std::size_t j = 0; j < masks.size(); ++j) {
    layers.push_back({masks[j], std::move(biases[j])});
  }
  return DeepCnn(config, std::move(layers), std::move(c), std::move(ledger));
}

RealizationCheck check_realization(const DeepCnn& net, const RidgeExpansion& ridge,
                                   std::span<const Eigen::VectorXd> points) {
  RealizationCheck check;
  for (double b : net.bound_ledger()) check.scale = std::max(check.scale, std::abs(b));
  for (const auto& x : points) {
    const double target = ridge(x);
    check.scale = std::max(check.scale, std::abs(target));
    check.max_deviation = std::max(check.max_deviation, std::abs(evaluate(net, x) - target));
  }
  return check;
}

long long free_parameter_formula(int s, int d, int J) noexcept {
  return static_cast<long long>(5 * s + 2) * J + 2LL * d - 2LL * s - 1;
}

long long count_free_parameters(const DeepCnn& net) {
  const NetworkConfig& cfg = net.config();
  long long total = 0;
  for (int j = 1; j <= cfg.J; ++j) {
    const auto& bias = net.layers()[static_cast<std::size_t>(j - 1)].bias.entries;
    total += cfg.s + 1;  // taps w_0..w_s
    if (j < cfg.J) {
      if (!has_repeated_middle(bias, cfg.s)) throw UnstructuredBias(j);
      const long long leading = std::min<long long>(cfg.s, bias.size());
      const long long trailing = std::min<long long>(cfg.s, bias.size() - leading);
      total += leading + 1 + trailing;
    } else {
      total += bias.size();
    }
  }
  total += net.output_coeffs().size();
  return total;
}

}  // namespace convforge
