#include <gtest/gtest.h>

#include <algorithm>
#include <complex>

#include "convforge/errors.hpp"
#include "convforge/factorize.hpp"
#include "convforge/polynomial.hpp"
#include "test_support.hpp"

namespace {

using namespace convforge;
using convforge::testing::Gen;
namespace ct = convforge::testing;

std::vector<int> sorted_degrees(const std::vector<RealPolynomial>& factors) {
  std::vector<int> deg;
  for (const auto& f : factors) deg.push_back(f.degree());
  std::sort(deg.rbegin(), deg.rend());
  return deg;
}

// Random W = w_n * ... * w_1 with each w of degree 1..s, stopped before max_degree.
FiniteSequence random_product(Gen& gen, int s, int max_degree) {
  FiniteSequence W = FiniteSequence::delta();
  const int target = gen.integer(1, max_degree);
  while (W.degree() < target) {
    const int deg = std::min(gen.integer(1, s), target - W.degree());
    W = convolve(gen.mask(deg), W);
  }
  return W;
}

void expect_valid_factorization(const FiniteSequence& W, int s, const FactorizationResult& r,
                                double tol) {
  const int M = W.degree();
  EXPECT_LT(r.J(), static_cast<double>(M) / (s - 1) + 1.0) << "M=" << M << " s=" << s;
  for (const auto& mask : r.masks) {
    EXPECT_LE(mask.degree(), s);
    EXPECT_GE(mask.degree(), 0);
  }
  const auto folded = ct::as_vector(convolve_all(r.masks));
  const double err = ct::max_diff(folded, ct::as_vector(W)) / W.max_abs();
  EXPECT_LE(err, tol);
  EXPECT_LE(r.max_rel_error, tol);
  EXPECT_NEAR(err, r.max_rel_error, 1e-15);
}

TEST(Symbol, CoefficientView) {
  const RealPolynomial p = symbol_of({1, 2, 1});
  EXPECT_EQ(2, p.degree());
  EXPECT_DOUBLE_EQ(9.0, p(2.0));  // 1 + 2z + z^2 at z = 2
  EXPECT_EQ(0, symbol_of(FiniteSequence::delta()).degree());
  EXPECT_DOUBLE_EQ(1.0, symbol_of(FiniteSequence::delta())(7.0));
  EXPECT_TRUE(symbol_of(FiniteSequence::zero(3)).is_zero());
}

TEST(Symbol, ConvolutionIsProduct) {
  Gen gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    const FiniteSequence a(gen.values(gen.integer(1, 6)));
    const FiniteSequence b(gen.values(gen.integer(1, 6)));
    const double z = gen.uniform(-1.5, 1.5);
    EXPECT_NEAR(symbol_of(a)(z) * symbol_of(b)(z), symbol_of(convolve(a, b))(z), 1e-12);
  }
}

TEST(FindRoots, UnitCirclePair) {
  const RootMultiset r = find_roots(RealPolynomial({1, 0, 1}), 1e-12);
  ASSERT_EQ(1u, r.conjugate_pairs.size());
  EXPECT_TRUE(r.real_roots.empty());
  EXPECT_NEAR(0.0, r.conjugate_pairs[0].x, 1e-14);
  EXPECT_NEAR(1.0, r.conjugate_pairs[0].y, 1e-14);
}

TEST(FindRoots, DoubleRealRoot) {
  // (z-2)^2 (z+3)
  const auto coeffs = ct::poly_from_roots({2.0, 2.0, -3.0}, 1.0);
  ASSERT_EQ((std::vector<double>{12, -8, -1, 1}), coeffs);
  const RealPolynomial p(coeffs);

  const RootMultiset r = find_roots(p, 1e-10);
  EXPECT_TRUE(r.conjugate_pairs.empty());
  EXPECT_EQ(3, r.degree());
  int at_two = 0, at_minus_three = 0;
  for (const auto& root : r.real_roots) {
    EXPECT_NEAR(0.0, p(root.value), 1e-9);
    if (std::abs(root.value - 2.0) < 1e-6) at_two += root.multiplicity;
    if (std::abs(root.value + 3.0) < 1e-6) at_minus_three += root.multiplicity;
  }
  EXPECT_EQ(2, at_two);
  EXPECT_EQ(1, at_minus_three);
}

TEST(FindRoots, ExactZeroRootsAreDeflated) {
  const RootMultiset r = find_roots(RealPolynomial({0, 0, -1, 1}), 1e-12);  // z^2 (z - 1)
  int zeros = 0;
  for (const auto& root : r.real_roots) {
    if (root.value == 0.0) zeros += root.multiplicity;
  }
  EXPECT_EQ(2, zeros);
  EXPECT_EQ(3, r.degree());
}

TEST(FindRoots, RecoversPlantedRoots) {
  Gen gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> planted_real;
    std::vector<std::complex<double>> planted_pairs;
    std::vector<std::complex<double>> all;
    for (int k = 0; k < 4; ++k) {
      planted_real.push_back(gen.uniform(-2.0, 2.0));
      all.emplace_back(planted_real.back());
      planted_pairs.emplace_back(gen.uniform(-2.0, 2.0), gen.uniform(0.2, 2.0));
      all.push_back(planted_pairs.back());
      all.push_back(std::conj(planted_pairs.back()));
    }
    const double leading = gen.uniform(0.5, 2.0);
    const RealPolynomial p(ct::poly_from_roots(all, leading));
    ASSERT_EQ(12, p.degree());

    const RootMultiset r = find_roots(p, 1e-10);
    EXPECT_EQ(12, r.degree());
    EXPECT_NEAR(leading, r.leading, 1e-15);

    std::vector<double> found_real;
    for (const auto& root : r.real_roots) found_real.insert(found_real.end(), root.multiplicity, root.value);
    ASSERT_EQ(planted_real.size(), found_real.size());
    for (double x : planted_real) {
      auto it = std::min_element(found_real.begin(), found_real.end(), [x](double a, double b) {
        return std::abs(a - x) < std::abs(b - x);
      });
      EXPECT_LE(std::abs(*it - x), 1e-8 * (1.0 + std::abs(x)));
      found_real.erase(it);
    }
    std::vector<std::complex<double>> found_pairs;
    for (const auto& c : r.conjugate_pairs) {
      EXPECT_GT(c.y, 0.0);
      found_pairs.insert(found_pairs.end(), c.multiplicity, {c.x, c.y});
    }
    ASSERT_EQ(planted_pairs.size(), found_pairs.size());
    for (const auto& z : planted_pairs) {
      auto it = std::min_element(found_pairs.begin(), found_pairs.end(),
                                 [z](auto a, auto b) { return std::abs(a - z) < std::abs(b - z); });
      EXPECT_LE(std::abs(*it - z), 1e-8 * (1.0 + std::abs(z)));
      found_pairs.erase(it);
    }
  }
}

TEST(FindRoots, LargeAndSmallRootsTogether) {
  const RealPolynomial p(ct::poly_from_roots({1e4, -1e-4, 3.0, {0.5, 40.0}, {0.5, -40.0}}, 1.0));
  const RootMultiset r = find_roots(p, 1e-10);
  EXPECT_EQ(5, r.degree());
  EXPECT_EQ(1u, r.conjugate_pairs.size());
}

TEST(FindRoots, Errors) {
  EXPECT_THROW(find_roots(RealPolynomial({0.0}), 1e-10), InvalidArgument);
  const RealPolynomial p(ct::poly_from_roots({0.3, -0.7, 1.1, {0.2, 0.9}, {0.2, -0.9}}, 1.0));
  EXPECT_THROW(find_roots(p, 1e-10, {.max_iterations = 0}), DidNotConverge);
  try {
    find_roots(p, 1e-10, {.max_iterations = 0});
  } catch (const DidNotConverge& e) {
    EXPECT_GT(e.worst_residual(), 1e-10);
  }
}

TEST(GroupFactors, PairsAndOneReal) {
  RootMultiset r;
  r.conjugate_pairs = {{0.1, 0.5, 1}, {-0.4, 1.2, 1}};
  r.real_roots = {{0.7, 1}};
  const auto factors = group_factors(r, 2);
  EXPECT_EQ((std::vector<int>{2, 2, 1}), sorted_degrees(factors));
  EXPECT_LT(3, 5.0 / 1 + 1);
}

TEST(GroupFactors, RootAtOrigin) {
  RootMultiset r;
  r.real_roots = {{0.0, 1}};
  const auto factors = group_factors(r, 2);
  ASSERT_EQ(1u, factors.size());
  EXPECT_EQ((std::vector<double>{0.0, 1.0}),
            std::vector<double>(factors[0].coeffs().begin(), factors[0].coeffs().end()));
}

TEST(GroupFactors, AllRealDegreeSeven) {
  RootMultiset r;
  for (int k = 0; k < 7; ++k) r.real_roots.push_back({0.3 * k - 1.0, 1});
  EXPECT_EQ((std::vector<int>{3, 3, 1}), sorted_degrees(group_factors(r, 3)));
}

TEST(GroupFactors, OddFilterTakesPairPlusReal) {
  RootMultiset r;
  r.conjugate_pairs = {{0.1, 0.5, 2}};
  r.real_roots = {{0.7, 1}, {-0.2, 1}};
  // (s-1)/2 = 1 pair and one real per factor
  const auto factors = group_factors(r, 3);
  EXPECT_EQ((std::vector<int>{3, 3}), sorted_degrees(factors));
}

TEST(GroupFactors, ProductIsMonicInput) {
  Gen gen(23);
  for (int trial = 0; trial < 30; ++trial) {
    RootMultiset r;
    r.leading = gen.uniform(0.5, 3.0);
    for (int k = gen.integer(0, 6); k > 0; --k) r.real_roots.push_back({gen.uniform(), gen.integer(1, 2)});
    for (int k = gen.integer(0, 6); k > 0; --k) r.conjugate_pairs.push_back({gen.uniform(), gen.uniform(0.1, 1.0), 1});
    if (r.degree() == 0) continue;
    const int s = gen.integer(2, 6);
    const auto factors = group_factors(r, s);
    RealPolynomial product({1.0});
    int total = 0;
    for (const auto& f : factors) {
      EXPECT_GE(f.degree(), 1);
      EXPECT_LE(f.degree(), s);
      total += f.degree();
      product = product * f;
    }
    EXPECT_EQ(r.degree(), total);
    EXPECT_LT(static_cast<int>(factors.size()), static_cast<double>(total) / (s - 1) + 1.0);

    RootMultiset monic = r;
    monic.leading = 1.0;
    const auto expected = monic.expand();
    const std::vector<double> got(product.coeffs().begin(), product.coeffs().end());
    const std::vector<double> want(expected.coeffs().begin(), expected.coeffs().end());
    EXPECT_LE(ct::max_diff(got, want), 1e-12 * ct::scale_of({ct::max_abs(want)}));
  }
}

TEST(Factorize, AlreadyShortEnough) {
  const auto r = factorize_mask({1, 2, 1}, 2, 1e-12);
  ASSERT_EQ(1, r.J());
  EXPECT_EQ(FiniteSequence({1, 2, 1}), r.masks[0]);
  EXPECT_EQ(0.0, r.max_rel_error);
}

TEST(Factorize, ConstantSequence) {
  const auto r = factorize_mask(FiniteSequence({-2.5, 0.0, 0.0}), 3, 1e-12);
  ASSERT_EQ(1, r.J());
  EXPECT_EQ(0, r.masks[0].degree());
  EXPECT_EQ(-2.5, r.masks[0][0]);
}

TEST(Factorize, RejectsShortFilterAndZero) {
  EXPECT_THROW(factorize_mask({1, 2, 1}, 1, 1e-10), InvalidArgument);
  EXPECT_THROW(factorize_mask(FiniteSequence::zero(4), 2, 1e-10), ZeroSequence);
}

TEST(Factorize, RoundTripOfKnownProduct) {
  const FiniteSequence W = convolve({1, 0, -1}, {2, 1, 1});
  const auto r = factorize_mask(W, 2, 1e-10);
  EXPECT_EQ(2, r.J());
  expect_valid_factorization(W, 2, r, 1e-10);
}

TEST(Factorize, MonomialFactorAtOrigin) {
  const auto r = factorize_mask({0, 1}, 2, 1e-12);
  ASSERT_EQ(1, r.J());
  EXPECT_EQ(0.0, r.masks[0][0]);
  EXPECT_EQ(1.0, r.masks[0][1]);
}

TEST(Factorize, LeadingScalarSpreadGeometrically) {
  const FiniteSequence W = convolve(convolve({1, 0, -1}, {2, 1, 1}), {0.5, 0.0, 3.0});
  ASSERT_EQ(-3.0, W[6]);
  const auto r = factorize_mask(W, 2, 1e-10);
  ASSERT_EQ(3, r.J());
  const double per_factor = std::cbrt(3.0);
  for (int j = 0; j < r.J(); ++j) {
    const auto& m = r.masks[static_cast<std::size_t>(j)];
    const double lead = m[m.degree()];
    EXPECT_NEAR(per_factor, std::abs(lead), 1e-12);
    // the sign rides on w^(J)
    EXPECT_EQ(j == r.J() - 1, lead < 0.0);
  }
}

TEST(Factorize, RandomRoundTrips) {
  Gen gen(24);
  const int filters[] = {2, 3, 5};
  for (int trial = 0; trial < 100; ++trial) {
    const int s = filters[trial % 3];
    const FiniteSequence W = random_product(gen, s, 32);
    const auto r = factorize_mask(W, s, 1e-6);
    expect_valid_factorization(W, s, r, 1e-6);

    double lead_product = 1.0;
    for (const auto& m : r.masks) lead_product *= m[m.degree()];
    const double WM = W[W.degree()];
    EXPECT_NEAR(WM, lead_product, 1e-10 * std::abs(WM));
  }
}

TEST(Factorize, ZeroLowTapsAndTrailingSupport) {
  Gen gen(25);
  for (int trial = 0; trial < 20; ++trial) {
    const int s = 2 + trial % 3;
    FiniteSequence W = random_product(gen, s, 20);
    const int shift = gen.integer(0, 3);
    std::vector<double> shifted(static_cast<std::size_t>(shift), 0.0);
    shifted.insert(shifted.end(), W.coeffs().begin(), W.coeffs().end());
    shifted.resize(shifted.size() + static_cast<std::size_t>(gen.integer(0, 5)), 0.0);
    const FiniteSequence padded(shifted);
    const auto r = factorize_mask(padded, s, 1e-6);
    expect_valid_factorization(padded, s, r, 1e-6);
    EXPECT_EQ(padded.support_hint(), r.reconstruction.support_hint());
  }
}

TEST(Factorize, TightToleranceFailsLoudly) {
  const FiniteSequence W = convolve(convolve({1, 0.3, -1}, {2, 1, 1}), {0.5, -0.1, 3.0});
  EXPECT_THROW(factorize_mask(W, 2, 1e-300), DidNotConverge);
}

TEST(PadWithDeltas, Examples) {
  const FiniteSequence m1({0.5, 2.0});
  const auto padded = pad_with_deltas({m1}, 3);
  ASSERT_EQ(3u, padded.size());
  EXPECT_EQ(m1, padded[0]);
  EXPECT_EQ(FiniteSequence::delta(), padded[1]);
  EXPECT_EQ(FiniteSequence::delta(), padded[2]);

  const auto only = pad_with_deltas({}, 2);
  EXPECT_EQ((std::vector<FiniteSequence>{FiniteSequence::delta(), FiniteSequence::delta()}), only);
  EXPECT_THROW(pad_with_deltas({m1, m1}, 1), InvalidArgument);
}

TEST(PadWithDeltas, FoldUnchanged) {
  Gen gen(26);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FiniteSequence> masks;
    for (int k = gen.integer(0, 4); k > 0; --k) masks.push_back(gen.mask(gen.integer(0, 3)));
    const auto before = convolve_all(masks);
    const auto after = convolve_all(pad_with_deltas(masks, static_cast<int>(masks.size()) + gen.integer(0, 4)));
    EXPECT_EQ(before, after);
  }
}

}  // namespace
