#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace batchrisk {

/// All randomness in the library flows from a single 64-bit seed expanded
/// into named substreams, so results are invariant to thread scheduling.
using Rng = std::mt19937_64;

namespace detail {

// SplitMix64 finalizer; good avalanche for seed derivation.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Derive a deterministic substream seed from a base seed and a path of
/// stream identifiers, e.g. (seed, {kStreamFit, chain}) or
/// (seed, {kStreamRisk, draw_index}).
inline std::uint64_t substream_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = detail::mix64(seed);
    for (std::uint64_t id : path) s = detail::mix64(s ^ detail::mix64(id));
    return s;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Rng(substream_seed(seed, path));
}

// Stream identifiers for the named substreams used across the library.
inline constexpr std::uint64_t kStreamFit = 1;
inline constexpr std::uint64_t kStreamSynthBaseline = 2;
inline constexpr std::uint64_t kStreamSynthSummaries = 3;
inline constexpr std::uint64_t kStreamRisk = 4;
inline constexpr std::uint64_t kStreamConditional = 5;
inline constexpr std::uint64_t kStreamRpr = 6;

}  // namespace batchrisk
