#pragma once

#include <cstdint>

namespace avgschro {

/// Counter-based uniform stream: every value is a pure function of
/// (seed, counter, slot), so parallel consumers can draw variate k without
/// coordinating. slot distinguishes the uniforms consumed by one variate.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform in the open interval (0,1); never returns 0 or 1 so that log and
/// tan transforms stay finite.
inline double uniform01(std::uint64_t seed, std::uint64_t counter,
                        std::uint64_t slot) {
  std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) + counter) + slot);
  return static_cast<double>(h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

}  // namespace rng
}  // namespace avgschro
