#pragma once

#include <cstdint>
#include <limits>
#include <random>

// Seeding and portable draw helpers. The mt19937_64 engine is fully specified
// by the standard; the std::*_distribution adapters are not, so all draws go
// through the functions below to keep outputs identical across toolchains.

namespace sfrf {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Independent child seed for stream (a, b) of a master seed. Used wherever
// work items must be seedable out of order (per tree, per individual, per
// snapshot) so scheduling cannot change results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t s = master;
  s ^= splitmix64(s) + 0x9e3779b97f4a7c15ull * (a + 1);
  s ^= splitmix64(s) + 0xbf58476d1ce4e5b9ull * (b + 1);
  return splitmix64(s);
}

// Uniform double in [0, 1), 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// Unbiased integer in [0, n); n >= 1.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Standard normal via Box-Muller (no cached second value, so the draw count
// per call is fixed).
inline double normal(Rng& rng) {
  const double u1 = 1.0 - uniform_unit(rng);  // (0, 1]
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline double normal(Rng& rng, double mean, double stddev) {
  return mean + stddev * normal(rng);
}

}  // namespace sfrf
