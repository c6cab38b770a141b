#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pensim {

// 64-bit avalanche finalizer (splitmix64 style).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based stream: every draw is a pure hash of (seed, path, step, lane),
// so the stream is independent of evaluation order and thread count.
inline std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                                  std::uint64_t lane) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ (path * 0xD1B54A32D192ED03ull));
  h = mix64(h ^ (step * 0x8CB92BA72F3D8DD7ull));
  return mix64(h ^ lane);
}

// Maps 64 random bits to (0, 1]; never returns 0 so it is log-safe.
inline double uniform01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// One standard normal per (seed, path, step): Box-Muller, cosine branch.
inline double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
  const double u1 = uniform01(counter_bits(seed, path, step, 0));
  const double u2 = uniform01(counter_bits(seed, path, step, 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pensim
