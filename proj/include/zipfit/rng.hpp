#pragma once

#include <cstdint>
#include <random>

namespace zipfit {

// mt19937_64 is fully specified by the standard, so streams are identical
// across platforms. The distribution helpers below are ours for the same
// reason: std::uniform_*_distribution output is implementation-defined.
using Rng = std::mt19937_64;

/// Independent sub-seed for stream `stream` of master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n), n > 0, unbiased.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// Stable 64-bit hash of a string (FNV-1a), used to key per-label seeds.
std::uint64_t stable_hash(const char* data, std::size_t size);

}  // namespace zipfit
