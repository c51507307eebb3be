#pragma once

#include <cmath>
#include <cstdint>

namespace causal {

/// SplitMix64 (Steele, Lea & Flood 2014). Chosen over the <random> engines
/// because the distributions below are defined here bit-for-bit, so a seed
/// produces the same stream on every platform and standard library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound), rejection-sampled so there is no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % bound;
  }

  /// Standard normal via Box-Muller; one draw per call, the pair's twin is dropped.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Independent child stream; advances this generator by one step.
  SplitMix64 split() { return SplitMix64(mix(next())); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed for sub-stream `stream` of a run seeded with `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return SplitMix64::mix(base ^ SplitMix64::mix(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace causal
