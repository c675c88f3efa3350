#pragma once

#include <cstdint>

namespace homlab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based hash of (seed, i, j): random access, no stored state.
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::int64_t i, std::int64_t j = 0) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(i));
    h = mix64(h ^ (static_cast<std::uint64_t>(j) * 0xd6e8feb86659fd93ULL));
    return h;
}

/// Uniform double in [0, 1) from the top 53 bits of the counter hash.
constexpr double counter_uniform(std::uint64_t seed, std::int64_t i, std::int64_t j = 0) {
    return static_cast<double>(counter_hash(seed, i, j) >> 11) * 0x1.0p-53;
}

/// Seed of the trial-th realization derived from an experiment seed.
constexpr std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t trial) {
    return mix64(mix64(seed) + 0x632be59bd9b4e019ULL * (trial + 1));
}

}  // namespace homlab
