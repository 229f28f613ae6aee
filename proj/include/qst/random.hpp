// Seeded sampling primitives. All distributions are hand-rolled on top of
// std::mt19937_64 so that a given seed produces the same stream on every
// platform (the std::*_distribution classes are implementation-defined).
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qst {

using Rng = std::mt19937_64;

// One SplitMix64 step; advances `state` and returns a scrambled output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent child seed for replica `index` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t state = master + index * 0x9e3779b97f4a7c15ULL;
  return splitmix64(state);
}

// Uniform double in [0, 1), 53-bit resolution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe as a log() argument.
inline double uniform01_pos(Rng& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Standard normal via Box-Muller; consumes exactly two engine draws.
inline double gaussian(Rng& rng) {
  const double u1 = uniform01_pos(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Poisson count by accumulating unit-rate exponential arrivals up to `mean`.
// Exact for any mean; cost is O(mean).
inline std::uint64_t poisson(Rng& rng, double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  std::uint64_t k = 0;
  double t = -std::log(uniform01_pos(rng));
  while (t <= mean) {
    ++k;
    t -= std::log(uniform01_pos(rng));
  }
  return k;
}

}  // namespace qst
