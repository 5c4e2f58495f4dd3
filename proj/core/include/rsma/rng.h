#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace rsma {

/// xoshiro256** (Blackman & Vigna) seeded through splitmix64. Every draw used
/// by the experiments goes through this class so that channel sets are
/// reproducible across platforms; std::normal_distribution is not portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in (0, 1].
  double uniform_open();
  /// Two independent N(0,1) draws (Box-Muller).
  std::pair<double, double> normal_pair();

  /// Independent stream for (experiment seed, index), e.g. one per channel.
  static Rng derive(std::uint64_t seed, std::uint64_t index);

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Stateless 64-bit mix of two words, used to derive stream seeds.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

}  // namespace rsma
