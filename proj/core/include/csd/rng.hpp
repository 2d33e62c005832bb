#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace csd {

/// Philox4x32-10 counter-based generator. A block is a pure function of
/// (key, counter), so draws keyed by (master seed, realization, site) are
/// identical no matter which thread or order produces them.
struct Philox {
  static std::array<uint32_t, 4> block(uint64_t key, const std::array<uint32_t, 4>& counter);
};

/// 64-bit mix (splitmix64 finalizer) used to derive stream keys from seeds.
uint64_t mix64(uint64_t z);

/// One deterministic random stream: a master seed plus a component id
/// (e.g. the two Gaussian layers of a chi-squared field).
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint32_t component = 0)
      : key_(mix64(seed + 0x9E3779B97F4A7C15ULL * (component + 1))) {}

  /// Two independent N(0,1) values for (realization, index).
  std::pair<double, double> normal_pair(uint64_t realization, uint64_t index) const;

  /// Two independent uniforms in (0,1) for (realization, index).
  std::pair<double, double> uniform_pair(uint64_t realization, uint64_t index) const;

 private:
  uint64_t key_;
};

}  // namespace csd
