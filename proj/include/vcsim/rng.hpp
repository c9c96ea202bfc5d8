#pragma once

#include <cstdint>
#include <random>

namespace vcsim {

// Deterministic random source. All sampling goes through the explicit
// helpers below instead of std::uniform_*_distribution, whose output is
// implementation-defined and would break cross-compiler reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n). Rejection sampling, n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vcsim
