#pragma once

#include <cstdint>
#include <random>

namespace wenods {

/// mt19937_64 with a platform-independent mapping to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [lo, hi]; 53 random mantissa bits.
  double uniform(double lo, double hi) {
    double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wenods
