#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "convforge/ridge.hpp"
#include "convforge/sequence.hpp"
#include "convforge/toeplitz.hpp"

namespace convforge {

struct NetworkConfig {
  int d = 1;
  int s = 2;
  int J = 1;

  /// d_j = d + j s
  int width(int j) const noexcept { return d + j * s; }
  std::vector<int> widths() const;
};

struct BiasVector {
  Eigen::VectorXd entries;
  /// Set for layers 1..J-1, whose biases repeat one value over 1-based
  /// positions s+1 .. d_j - s.
  bool structured = false;
};

/// True when entries s .. size-s-1 (0-based) agree with entries[s] to
/// tol * max(1, max|entries|).
bool has_repeated_middle(const Eigen::VectorXd& entries, int s, double tol = 1e-12);

struct Layer {
  FiniteSequence mask;
  BiasVector bias;
};

/// A depth-J convolutional network with linearly growing widths.
///
/// h^(0) = x, h^(j) = relu(T^(j) h^(j-1) - b^(j)), output = c . h^(J).
/// Immutable once built; evaluation is safe from any number of threads.
class DeepCnn {
 public:
  /// Throws DimensionMismatch / MaskTooLong when layers, biases, output
  /// coefficients or the bound ledger disagree with config.
  DeepCnn(NetworkConfig config, std::vector<Layer> layers, Eigen::VectorXd output_coeffs,
          std::vector<double> bound_ledger);

  const NetworkConfig& config() const noexcept { return config_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Eigen::VectorXd& output_coeffs() const noexcept { return output_coeffs_; }
  /// B^(0), ..., B^(J)
  const std::vector<double>& bound_ledger() const noexcept { return bound_ledger_; }
  /// T^(j) for j = 1..J
  const ConvMatrix& transform(int j) const { return transforms_.at(static_cast<std::size_t>(j - 1)); }

  std::vector<FiniteSequence> masks() const;

 private:
  NetworkConfig config_;
  std::vector<Layer> layers_;
  Eigen::VectorXd output_coeffs_;
  std::vector<double> bound_ledger_;
  std::vector<ConvMatrix> transforms_;
};

struct ForwardPass {
  /// activations[0] = x, activations[j] = h^(j)
  std::vector<Eigen::VectorXd> activations;
  double output = 0.0;
};

/// Throws DimensionMismatch when x does not have d components.
ForwardPass forward(const DeepCnn& net, const Eigen::VectorXd& x);

/// Output only, without keeping intermediate activations.
double evaluate(const DeepCnn& net, const Eigen::VectorXd& x);

/// W with [W_{(m+1)d-1} ... W_1 W_0] = [alpha_m^T ... alpha_1^T alpha_0^T],
/// i.e. W_{kd+i} = alpha_k[d-1-i]. Row (k+1)d of T^W is then alpha_k^T.
FiniteSequence stack_ridge_directions(const RidgeExpansion& ridge);

/// B^(0) = domain_bound, B^(j) = ||w^(j)||_1 B^(j-1).
std::vector<double> bound_ledger(std::span<const FiniteSequence> masks, double domain_bound);

/// Biases that keep layers 1..J-1 in the linear regime of the ReLU,
/// h^(j)(x) = T^(j)...T^(1) x + B^(j) 1, and give the last layer the
/// components alpha_0.x + B^(J) at d, B^(J) at d+Js, the ramps
/// (alpha_k.x - t_k)_+ at (k+1)d and zero elsewhere (1-based positions).
///
/// masks must already be padded to config.J entries.
std::vector<BiasVector> build_biases(std::span<const FiniteSequence> masks,
                                     const RidgeExpansion& ridge, double domain_bound,
                                     const NetworkConfig& config);

/// c with c_d = 1, c_{(k+1)d} = v beta_k / m, c_{d+Js} = beta0 / B^(J) - 1 and
/// zeros elsewhere (1-based), so that c . h^(J)(x) = F_m(x). Throws
/// DegenerateScale when B^(J) == 0.
Eigen::VectorXd realize_output_coeffs(const NetworkConfig& config, double final_bound,
                                      const RidgeExpansion& ridge);
Eigen::VectorXd realize_output_coeffs(const DeepCnn& net, const RidgeExpansion& ridge);

/// Smallest J with J (s-1) >= (m+1) d.
int minimal_depth(int d, int s, int m);

struct BuildOptions {
  double factor_tolerance = 1e-9;
};

/// Stack the ridge directions, factor them into J masks, and attach the
/// biases and output coefficients that realize F_m exactly on [-B0, B0]^d.
///
/// Throws InvalidArgument unless 2 <= s <= d and domain_bound > 0,
/// DepthTooSmall when J (s-1) < (m+1) d, DegenerateScale when every
/// direction is zero, and DidNotConverge from the factorization.
DeepCnn build_network(const RidgeExpansion& ridge, int s, int J, double domain_bound = 1.0,
                      const BuildOptions& opts = {});

struct RealizationCheck {
  double max_deviation = 0.0;  // max |output - F_m(x)|
  double scale = 1.0;          // max(1, B^(0..J), |F_m(x)|)
  double relative() const noexcept { return max_deviation / scale; }
};

/// Compare the network output against F_m on the given points.
RealizationCheck check_realization(const DeepCnn& net, const RidgeExpansion& ridge,
                                   std::span<const Eigen::VectorXd> points);

/// (5s+2) J + 2d - 2s - 1
long long free_parameter_formula(int s, int d, int J) noexcept;

/// Enumerates free parameters layer by layer: s+1 mask taps and 2s+1 bias
/// values (s leading, the repeated middle, s trailing) for j < J, s+1 taps and
/// a full bias for layer J, and d_J output coefficients. Throws
/// UnstructuredBias if a hidden bias does not repeat its middle component.
long long count_free_parameters(const DeepCnn& net);

}  // namespace convforge
