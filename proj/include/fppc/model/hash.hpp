#pragma once

#include <cstdint>

namespace fppc {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

/// Combine two words; not symmetric.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept
{
    return mix64(mix64(a + kGolden) ^ (b + 0x632be59bd9b4e019ull));
}

/// Per-trial stream word. Distinct (master, trial) pairs give distinct streams
/// for all trial indices below 2^64 since both steps are bijections in `trial`.
constexpr std::uint64_t stream_word(std::uint64_t master_seed,
                                    std::uint64_t trial_index) noexcept
{
    return mix64(mix64(master_seed ^ 0xd1b54a32d192ed03ull) + trial_index * kGolden);
}

/// Trial index used by sweep cell `cell`, trial `trial`.
constexpr std::uint64_t cell_trial_index(std::uint64_t cell, std::uint64_t trial) noexcept
{
    return (cell << 32) | (trial & 0xffffffffull);
}

}  // namespace fppc
