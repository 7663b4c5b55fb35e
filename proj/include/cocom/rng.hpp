#pragma once

#include <cstdint>

namespace cocom {

// xoshiro256** seeded through splitmix64. Uniform and normal transforms are written out here
// instead of using <random> distributions so sequences match across standard libraries.
class Rng {
 public:
  static constexpr const char* kName = "xoshiro256**/splitmix64";

  explicit Rng(std::uint64_t seed);
  // independent stream keyed by (seed, a, b)
  static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

  std::uint64_t next_u64();
  double uniform01();  // [0, 1), 53 random bits
  double uniform(double lo, double hi);
  double normal();  // Box-Muller, one draw per call
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace cocom
