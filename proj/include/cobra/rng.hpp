#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace cobra {

/// SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Combines a seed with a list of integer tags into a new, decorrelated seed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

/// xoshiro256** generator, state filled from the seed by SplitMix64.
///
/// Every draw is defined in terms of 64-bit integer operations plus IEEE
/// double arithmetic on <cmath> functions, so a seed yields the same stream
/// on every conforming platform. Single consumer; not thread-safe.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via the Box-Muller transform (both outputs are used).
  double normal();

  /// Poisson(mean). Multiplication method below mean 30, PTRS above.
  std::uint64_t poisson(double mean);

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cobra
