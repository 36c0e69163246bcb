#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace asplat {

/// Counter-based generator: the n-th draw of stream s under seed k is a pure
/// function of (k, s, n), so parallel consumers can index draws directly.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)))) {}

  std::uint64_t at(std::uint64_t counter) const { return mix(key_ + 0x9E3779B97F4A7C15ull * counter); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return at(counter_++); }
  double uniform() { return uniform_at(counter_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  /// Standard normal via Box-Muller (consumes two draws).
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace asplat
