#pragma once

#include <span>
#include <vector>

#include "convforge/polynomial.hpp"
#include "convforge/sequence.hpp"

namespace convforge {

struct FactorizationResult {
  /// w^(1) first; each mask has declared support {0..s}.
  std::vector<FiniteSequence> masks;
  /// Fold of the masks, on the input's declared support.
  FiniteSequence reconstruction;
  /// ||reconstruction - W||_inf / ||W||_inf
  double max_rel_error = 0.0;

  int J() const noexcept { return static_cast<int>(masks.size()); }
};

/// Split the root multiset into monic real factors of degree 1..s.
///
/// Each factor takes up to s/2 conjugate pairs, topped up with real roots
/// (so an odd s gets (s-1)/2 pairs and one real root while both last). Within
/// a factor, roots are chosen Leja-style: start from the largest remaining
/// root, then repeatedly add the root whose distance product to the roots
/// already in the factor is largest. Every factor but the last reaches
/// degree s - 1 or more, so the count stays below M/(s-1) + 1.
///
/// The product of the returned factors is the monic version of the input.
std::vector<RealPolynomial> group_factors(const RootMultiset& roots, int s);

/// Factor W into masks supported in {0..s} with W = w^(J) * ... * w^(1).
///
/// The leading coefficient W_M is spread as |W_M|^(1/J) over every mask, the
/// sign going to w^(J). Throws InvalidArgument for s < 2, ZeroSequence for the
/// zero input, and DidNotConverge when the fold misses W by more than tol.
FactorizationResult factorize_mask(const FiniteSequence& W, int s, double tol);

/// Append delta masks until there are J_target of them.
std::vector<FiniteSequence> pad_with_deltas(std::vector<FiniteSequence> masks, int J_target);

}  // namespace convforge
