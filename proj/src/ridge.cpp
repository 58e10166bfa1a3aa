#include "convforge/ridge.hpp"

#include <cmath>
#include <string>

#include "convforge/errors.hpp"

namespace convforge {

double RidgeExpansion::operator()(const Eigen::VectorXd& x) const {
  double sum = 0.0;
  for (const auto& term : terms) sum += term.beta * ramp(term.alpha.dot(x) - term.t);
  const double tail = terms.empty() ? 0.0 : v / static_cast<double>(terms.size()) * sum;
  return beta0 + alpha0.dot(x) + tail;
}

void RidgeExpansion::validate() const {
  if (alpha0.size() == 0) throw DimensionMismatch("alpha0 must have at least one component");
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& term = terms[k];
    const std::string where = "ridge term " + std::to_string(k + 1);
    if (term.alpha.size() != alpha0.size()) {
      throw DimensionMismatch(where + " has direction of length " +
                              std::to_string(term.alpha.size()) + ", expected " +
                              std::to_string(alpha0.size()));
    }
    if (std::abs(term.alpha.lpNorm<1>() - 1.0) > 1e-10) {
      throw InvalidArgument(where + ": direction must have unit l1 norm");
    }
    if (!(term.beta >= -1.0 && term.beta <= 1.0)) {
      throw InvalidArgument(where + ": beta must lie in [-1, 1]");
    }
    if (!(term.t >= 0.0 && term.t <= 1.0)) {
      throw InvalidArgument(where + ": threshold t must lie in [0, 1]");
    }
  }
}

}  // namespace convforge
