#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace convforge::detail {

// Portable draws on top of mt19937_64, whose output sequence is fixed by the
// standard (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential() { return -std::log1p(-uniform()); }
  std::size_t below(std::size_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return static_cast<std::size_t>(r % n);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace convforge::detail
