#pragma once

#include <cstdint>
#include <random>

namespace wonham {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the stream owned by replicate `index`:
/// mix64(seed ^ mix64(index)).
constexpr std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index));
}

inline std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(replicate_seed(seed, index));
}

}  // namespace wonham
