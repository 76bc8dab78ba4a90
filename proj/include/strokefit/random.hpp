#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace strokefit {

/// Counter-based generator: every draw is a pure function of (seed, counter),
/// so sequences are reproducible across platforms and call orders.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + mix(counter)); }

  // [0, 1)
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  // Box-Muller on draws 2*counter and 2*counter+1.
  double gaussian(std::uint64_t counter) const {
    const double u1 = 1.0 - uniform(2 * counter);  // (0, 1]
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Sequential convenience wrappers.
  double next_uniform() { return uniform(cursor_++); }
  double next_uniform(double lo, double hi) { return uniform(cursor_++, lo, hi); }
  double next_gaussian() { return gaussian(cursor_++); }
  std::uint64_t next_bits() { return bits(cursor_++); }

 private:
  std::uint64_t key_;
  std::uint64_t cursor_ = 0;
};

}  // namespace strokefit
