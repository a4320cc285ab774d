#pragma once

#include <cstdint>

namespace gmspec {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used both as a
// counter-based generator (mix of seed and counter) and to derive
// independent replicate streams from a master seed.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Output number `counter` of the SplitMix64 stream started at `seed`.
constexpr std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) noexcept {
  return splitmix64_mix(seed + (counter + 1) * kGoldenGamma);
}

/// Seed of replicate `k` under master seed `master`.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t k) noexcept {
  return splitmix64_mix(splitmix64_mix(master) ^ splitmix64_at(0x6A09E667F3BCC909ULL, k));
}

}  // namespace gmspec
