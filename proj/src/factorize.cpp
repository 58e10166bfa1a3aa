#include "convforge/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "convforge/errors.hpp"

namespace convforge {

namespace {

struct Unit {
  bool pair;
  std::complex<double> root;  // x + i y for a pair, upper half plane
};

double log_distance_product(const Unit& u, std::span<const std::complex<double>> group) {
  double score = 0.0;
  auto add = [&](std::complex<double> z) {
    for (const auto& g : group) {
      const double dist = std::abs(z - g);
      if (dist == 0.0) return false;
      score += std::log(dist);
    }
    return true;
  };
  if (!add(u.root)) return -std::numeric_limits<double>::infinity();
  if (u.pair && !add(std::conj(u.root))) return -std::numeric_limits<double>::infinity();
  return score;
}

double max_abs_coeff(const RealPolynomial& p) {
  double m = 0.0;
  for (double c : p.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

// Greedy order in which every partial product stays as small as possible.
std::vector<RealPolynomial> order_for_folding(std::vector<RealPolynomial> rest) {
  std::vector<RealPolynomial> out;
  out.reserve(rest.size());
  RealPolynomial partial({1.0});
  while (!rest.empty()) {
    std::size_t best = 0;
    double best_size = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rest.size(); ++i) {
      const double size = max_abs_coeff(partial * rest[i]);
      if (size < best_size) {
        best = i;
        best_size = size;
      }
    }
    partial = partial * rest[best];
    out.push_back(std::move(rest[best]));
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

}  // namespace

std::vector<RealPolynomial> group_factors(const RootMultiset& roots, int s) {
  if (s < 2) throw InvalidArgument("s must be ≥ 2");

  std::vector<Unit> pairs;
  std::vector<Unit> reals;
  for (const auto& c : roots.conjugate_pairs) {
    for (int m = 0; m < c.multiplicity; ++m) pairs.push_back({true, {c.x, c.y}});
  }
  for (const auto& r : roots.real_roots) {
    for (int m = 0; m < r.multiplicity; ++m) reals.push_back({false, {r.value, 0.0}});
  }

  std::vector<RealPolynomial> factors;
  while (!pairs.empty() || !reals.empty()) {
    int want_pairs = std::min<int>(static_cast<int>(pairs.size()), s / 2);
    int want_reals = std::min<int>(static_cast<int>(reals.size()), s - 2 * want_pairs);

    std::vector<std::complex<double>> group_roots;
    RealPolynomial factor({1.0});
    bool first = true;
    while (want_pairs > 0 || want_reals > 0) {
      // best candidate over the kinds still wanted; ties keep the earliest
      std::vector<Unit>* best_list = nullptr;
      std::size_t best_index = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (auto [list, wanted] : {std::pair{&pairs, want_pairs}, std::pair{&reals, want_reals}}) {
        if (wanted == 0) continue;
        for (std::size_t i = 0; i < list->size(); ++i) {
          const Unit& u = (*list)[i];
          const double score = first ? std::abs(u.root) : log_distance_product(u, group_roots);
          if (best_list == nullptr || score > best_score) {
            best_list = list;
            best_index = i;
            best_score = score;
          }
        }
      }
      const Unit chosen = (*best_list)[best_index];
      best_list->erase(best_list->begin() + static_cast<std::ptrdiff_t>(best_index));
      first = false;

      group_roots.push_back(chosen.root);
      if (chosen.pair) {
        group_roots.push_back(std::conj(chosen.root));
        factor = factor * ConjugatePair{chosen.root.real(), chosen.root.imag(), 1}.quadratic();
        --want_pairs;
      } else {
        factor = factor * RealPolynomial({-chosen.root.real(), 1.0});
        --want_reals;
      }
    }
    factors.push_back(std::move(factor));
  }
  return factors;
}

FactorizationResult factorize_mask(const FiniteSequence& W, int s, double tol) {
  if (s < 2) throw InvalidArgument("s must be ≥ 2");
  const int M = W.degree();
  if (M < 0) throw ZeroSequence();

  FactorizationResult result;
  if (M <= s) {
    result.masks.push_back(FiniteSequence(std::vector<double>(W.coeffs().begin(),
                                                              W.coeffs().begin() + M + 1),
                                          s));
  } else {
    const RootMultiset roots = find_roots(symbol_of(W), tol);
    const std::vector<RealPolynomial> factors = order_for_folding(group_factors(roots, s));
    const int J = static_cast<int>(factors.size());
    const double magnitude = std::pow(std::abs(roots.leading), 1.0 / J);
    for (int j = 0; j < J; ++j) {
      double scale = magnitude;
      if (j == J - 1 && roots.leading < 0.0) scale = -scale;
      std::vector<double> c(factors[j].coeffs().begin(), factors[j].coeffs().end());
      for (double& v : c) v *= scale;
      result.masks.push_back(FiniteSequence(std::move(c), s));
    }
  }

  const FiniteSequence folded = convolve_all(result.masks);
  std::vector<double> rebuilt(W.coeffs().size(), 0.0);
  double diff = 0.0;
  for (int k = 0; k <= std::max(folded.support_hint(), W.support_hint()); ++k) {
    if (k <= W.support_hint()) rebuilt[static_cast<std::size_t>(k)] = folded[k];
    diff = std::max(diff, std::abs(folded[k] - W[k]));
  }
  result.reconstruction = FiniteSequence(std::move(rebuilt));
  result.max_rel_error = diff / W.max_abs();
  if (!(result.max_rel_error <= tol)) {
    throw DidNotConverge("factor fold does not reproduce W", result.max_rel_error);
  }
  return result;
}

std::vector<FiniteSequence> pad_with_deltas(std::vector<FiniteSequence> masks, int J_target) {
  if (J_target < static_cast<int>(masks.size())) {
    throw InvalidArgument("J_target=" + std::to_string(J_target) + " is below the " +
                          std::to_string(masks.size()) + " masks already present");
  }
  masks.resize(static_cast<std::size_t>(J_target), FiniteSequence::delta());
  return masks;
}

}  // namespace convforge
