#include "convforge/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "convforge/errors.hpp"

namespace convforge {

using cplx = std::complex<double>;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<double> strip_trailing_zeros(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  if (c.empty()) c.push_back(0.0);
  return c;
}

struct NewtonStep {
  cplx ratio;             // p(z) / p'(z)
  double backward_error;  // |p(z)| / sum |a_k| |z|^k
};

// Horner in z for |z| <= 1, and on the reversed polynomial in 1/z otherwise,
// so that neither branch overflows for large roots.
NewtonStep newton_step(std::span<const double> a, cplx z) {
  const int n = static_cast<int>(a.size()) - 1;
  if (std::abs(z) <= 1.0) {
    cplx p = a[n];
    cplx dp = 0.0;
    double ap = std::abs(a[n]);
    const double az = std::abs(z);
    for (int k = n - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + a[k];
      ap = ap * az + std::abs(a[k]);
    }
    const double err = ap > 0.0 ? std::abs(p) / ap : 0.0;
    if (dp == cplx(0.0)) return {cplx(kEps * (1.0 + az)), err};
    return {p / dp, err};
  }
  const cplx y = 1.0 / z;
  const double ay = std::abs(y);
  cplx q = a[0];
  cplx dq = 0.0;
  double aq = std::abs(a[0]);
  for (int k = 1; k <= n; ++k) {
    dq = dq * y + q;
    q = q * y + a[k];
    aq = aq * ay + std::abs(a[k]);
  }
  const double err = aq > 0.0 ? std::abs(q) / aq : 0.0;
  const cplx denom = static_cast<double>(n) * q - y * dq;
  if (denom == cplx(0.0)) return {cplx(kEps * (1.0 + std::abs(z))), err};
  return {z * q / denom, err};
}

// Starting points on circles whose radii come from the upper convex hull of
// (k, log|a_k|).
std::vector<cplx> newton_polygon_start(std::span<const double> a) {
  const int n = static_cast<int>(a.size()) - 1;
  std::vector<int> hull;
  for (int k = 0; k <= n; ++k) {
    if (a[k] == 0.0) continue;
    const double yk = std::log(std::abs(a[k]));
    while (hull.size() >= 2) {
      const int i = hull[hull.size() - 2];
      const int j = hull.back();
      const double yi = std::log(std::abs(a[i]));
      const double yj = std::log(std::abs(a[j]));
      // drop j when it lies on or below the chord from i to k
      if ((yj - yi) * (k - i) <= (yk - yi) * (j - i)) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(k);
  }

  constexpr double kOffset = 0.7;
  std::vector<cplx> z;
  z.reserve(static_cast<std::size_t>(n));
  for (std::size_t h = 1; h < hull.size(); ++h) {
    const int i = hull[h - 1];
    const int j = hull[h];
    const int count = j - i;
    const double radius = std::pow(std::abs(a[i]) / std::abs(a[j]), 1.0 / count);
    for (int m = 0; m < count; ++m) {
      const double angle =
          2.0 * std::numbers::pi * (static_cast<double>(m) / count + static_cast<double>(i) / n) +
          kOffset;
      z.push_back(std::polar(radius, angle));
    }
  }
  return z;
}

// Leja order: largest modulus first, then each next root maximizes the
// distance product to those already placed. Expanding in this order keeps the
// partial products from growing far beyond the final coefficients.
std::vector<cplx> leja_order(std::span<const cplx> roots) {
  std::vector<cplx> rest(roots.begin(), roots.end());
  std::vector<cplx> out;
  out.reserve(rest.size());
  std::vector<double> score(rest.size(), 0.0);
  while (!rest.empty()) {
    std::size_t best = 0;
    if (out.empty()) {
      for (std::size_t i = 1; i < rest.size(); ++i) {
        if (std::abs(rest[i]) > std::abs(rest[best])) best = i;
      }
    } else {
      for (std::size_t i = 1; i < rest.size(); ++i) {
        if (score[i] > score[best]) best = i;
      }
    }
    const cplx chosen = rest[best];
    out.push_back(chosen);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
    score.erase(score.begin() + static_cast<std::ptrdiff_t>(best));
    for (std::size_t i = 0; i < rest.size(); ++i) {
      const double dist = std::abs(rest[i] - chosen);
      score[i] += dist > 0.0 ? std::log(dist) : -std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

std::vector<cplx> expand_complex(std::span<const cplx> unordered, double leading) {
  const std::vector<cplx> roots = leja_order(unordered);
  std::vector<cplx> c{leading};
  for (const cplx& r : roots) {
    c.push_back(0.0);
    for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
  }
  return c;
}

double relative_mismatch(std::span<const cplx> expanded, std::span<const double> target) {
  double num = 0.0;
  double den = 0.0;
  const std::size_t n = std::max(expanded.size(), target.size());
  for (std::size_t k = 0; k < n; ++k) {
    const cplx e = k < expanded.size() ? expanded[k] : cplx(0.0);
    const double t = k < target.size() ? target[k] : 0.0;
    num = std::max(num, std::abs(e - t));
    den = std::max(den, std::abs(t));
  }
  return num / den;
}

// Newton on the (m-1)-th derivative, where an m-fold root is simple.
cplx refine_multiple_root(std::span<const double> p, cplx z, int m) {
  std::vector<double> d(p.begin(), p.end());
  for (int k = 1; k < m && d.size() > 1; ++k) {
    for (std::size_t i = 1; i < d.size(); ++i) d[i - 1] = static_cast<double>(i) * d[i];
    d.pop_back();
  }
  if (d.size() <= 1) return z;
  double best = newton_step(d, z).backward_error;
  for (int it = 0; it < 20; ++it) {
    const NewtonStep step = newton_step(d, z);
    const cplx candidate = z - step.ratio;
    const double err = newton_step(d, candidate).backward_error;
    if (!(err < best)) break;
    z = candidate;
    best = err;
  }
  return z;
}

struct Cluster {
  cplx center;
  int multiplicity;
};

// Single-linkage clusters of nearby roots; each merge is kept only if it does
// not make the expanded polynomial drift from p.
std::vector<Cluster> merge_clusters(std::vector<cplx> roots, std::span<const double> p,
                                    double tol) {
  constexpr double kRadius = 1e-3;
  const std::size_t n = roots.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (label[v] >= 0) continue;
        const double reach = kRadius * (1.0 + std::max(std::abs(roots[u]), std::abs(roots[v])));
        if (std::abs(roots[u] - roots[v]) <= reach) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }

  const double leading = p.back();
  std::vector<cplx> current = roots;
  double current_err = relative_mismatch(expand_complex(current, leading), p);

  std::vector<Cluster> clusters;
  for (int c = 0; c < next; ++c) {
    std::vector<std::size_t> members;
    cplx sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (label[i] == c) {
        members.push_back(i);
        sum += roots[i];
      }
    }
    if (members.size() == 1) {
      clusters.push_back({roots[members[0]], 1});
      continue;
    }
    cplx center = sum / static_cast<double>(members.size());
    center = refine_multiple_root(p, center, static_cast<int>(members.size()));
    std::vector<cplx> trial = current;
    for (std::size_t i : members) trial[i] = center;
    const double trial_err = relative_mismatch(expand_complex(trial, leading), p);
    if (trial_err <= std::max(2.0 * current_err, 1e-3 * tol)) {
      current = std::move(trial);
      current_err = trial_err;
      clusters.push_back({center, static_cast<int>(members.size())});
    } else {
      for (std::size_t i : members) clusters.push_back({roots[i], 1});
    }
  }
  return clusters;
}

}  // namespace

RealPolynomial::RealPolynomial(std::vector<double> coeffs)
    : coeffs_(strip_trailing_zeros(std::move(coeffs))) {}

cplx RealPolynomial::operator()(cplx z) const noexcept {
  cplx acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double RealPolynomial::operator()(double x) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
  std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return RealPolynomial(std::move(out));
}

RealPolynomial symbol_of(const FiniteSequence& seq) {
  const auto c = seq.coeffs();
  return RealPolynomial(std::vector<double>(c.begin(), c.end()));
}

FiniteSequence to_sequence(const RealPolynomial& p) {
  const auto c = p.coeffs();
  return FiniteSequence(std::vector<double>(c.begin(), c.end()));
}

RealPolynomial ConjugatePair::quadratic() const {
  return RealPolynomial({x * x + y * y, -2.0 * x, 1.0});
}

int RootMultiset::degree() const noexcept {
  int n = 0;
  for (const auto& r : real_roots) n += r.multiplicity;
  for (const auto& c : conjugate_pairs) n += 2 * c.multiplicity;
  return n;
}

RealPolynomial RootMultiset::expand() const {
  RealPolynomial acc({leading});
  for (const auto& r : real_roots) {
    const RealPolynomial lin({-r.value, 1.0});
    for (int m = 0; m < r.multiplicity; ++m) acc = acc * lin;
  }
  for (const auto& c : conjugate_pairs) {
    const RealPolynomial quad = c.quadratic();
    for (int m = 0; m < c.multiplicity; ++m) acc = acc * quad;
  }
  return acc;
}

std::vector<cplx> aberth_roots(std::span<const double> a, int max_iterations) {
  const int n = static_cast<int>(a.size()) - 1;
  if (n <= 0) return {};
  if (n == 1) return {cplx(-a[0] / a[1])};

  std::vector<cplx> z = newton_polygon_start(a);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  const double stop = 4.0 * (n + 1) * kEps;

  for (int it = 0; it < max_iterations; ++it) {
    bool all_done = true;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      const NewtonStep step = newton_step(a, z[i]);
      if (step.backward_error <= stop) {
        done[i] = true;
        continue;
      }
      all_done = false;
      cplx repulsion = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      }
      const cplx correction = step.ratio / (1.0 - step.ratio * repulsion);
      z[i] -= correction;
      if (std::abs(correction) <= kEps * std::abs(z[i])) done[i] = true;
    }
    if (all_done) break;
  }

  // Newton polish; keep a step only if it lowers the backward error.
  for (cplx& root : z) {
    for (int pass = 0; pass < 3; ++pass) {
      const NewtonStep here = newton_step(a, root);
      const cplx candidate = root - here.ratio;
      if (newton_step(a, candidate).backward_error < here.backward_error) {
        root = candidate;
      } else {
        break;
      }
    }
  }
  return z;
}

RootMultiset find_roots(const RealPolynomial& p, double tol, const RootFinderOptions& opts) {
  if (p.is_zero()) throw InvalidArgument("cannot find roots of the zero polynomial");

  RootMultiset out;
  out.leading = p.leading();

  const auto all = p.coeffs();
  int zeros = 0;
  while (all[static_cast<std::size_t>(zeros)] == 0.0) ++zeros;
  if (zeros > 0) out.real_roots.push_back({0.0, zeros});

  const std::span<const double> a = all.subspan(static_cast<std::size_t>(zeros));
  if (a.size() <= 1) return out;

  const std::vector<cplx> raw = aberth_roots(a, opts.max_iterations);
  const std::vector<Cluster> clusters = merge_clusters(raw, a, tol);

  struct Pending {
    cplx z;
    int multiplicity;
  };
  std::vector<Pending> upper;
  std::vector<Pending> lower;
  for (const auto& c : clusters) {
    if (std::abs(c.center.imag()) <= opts.pairing_tolerance * (1.0 + std::abs(c.center))) {
      out.real_roots.push_back({c.center.real(), c.multiplicity});
    } else if (c.center.imag() > 0.0) {
      upper.push_back({c.center, c.multiplicity});
    } else {
      lower.push_back({c.center, c.multiplicity});
    }
  }

  // Greedy nearest-conjugate matching.
  struct Candidate {
    double distance;
    std::size_t u;
    std::size_t l;
  };
  std::vector<Candidate> candidates;
  for (std::size_t u = 0; u < upper.size(); ++u) {
    for (std::size_t l = 0; l < lower.size(); ++l) {
      candidates.push_back({std::abs(upper[u].z - std::conj(lower[l].z)), u, l});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) { return x.distance < y.distance; });
  for (const auto& cand : candidates) {
    Pending& u = upper[cand.u];
    Pending& l = lower[cand.l];
    const int m = std::min(u.multiplicity, l.multiplicity);
    if (m == 0) continue;
    out.conjugate_pairs.push_back(
        {0.5 * (u.z.real() + l.z.real()), 0.5 * (u.z.imag() - l.z.imag()), m});
    u.multiplicity -= m;
    l.multiplicity -= m;
  }
  // Anything left without a partner is folded onto the real axis; the
  // reconstruction check below decides whether that was acceptable.
  for (const auto* side : {&upper, &lower}) {
    for (const auto& r : *side) {
      if (r.multiplicity > 0) out.real_roots.push_back({r.z.real(), r.multiplicity});
    }
  }

  std::vector<cplx> listed;
  for (const auto& r : out.real_roots) listed.insert(listed.end(), r.multiplicity, cplx(r.value));
  for (const auto& c : out.conjugate_pairs) {
    for (int m = 0; m < c.multiplicity; ++m) {
      listed.emplace_back(c.x, c.y);
      listed.emplace_back(c.x, -c.y);
    }
  }
  const double err = relative_mismatch(expand_complex(listed, out.leading), all);
  if (!(err <= tol)) throw DidNotConverge("root expansion does not reproduce the polynomial", err);
  return out;
}

}  // namespace convforge
