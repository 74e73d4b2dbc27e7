#pragma once

#include <cstdint>

namespace hodge {

// SplitMix64 (Steele, Lea, Flood 2014). Constants:
//   increment  0x9E3779B97F4A7C15
//   mix        z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//              z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
// The k-th output (k = 0, 1, ...) of a stream seeded with s is
// mix(s + (k + 1) * increment), so any element can be computed without
// replaying the stream. Harmonic start vectors rely on this: the owner of
// edge e draws element e directly.
inline constexpr std::uint64_t kSplitMixIncrement = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t splitmix_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// k-th element of the stream seeded with `seed`.
inline constexpr std::uint64_t splitmix_at(std::uint64_t seed, std::uint64_t k) noexcept {
    return splitmix_mix(seed + (k + 1) * kSplitMixIncrement);
}

/// Top 53 bits mapped to [0, 1).
inline constexpr double to_unit_interval(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += kSplitMixIncrement;
        return splitmix_mix(state_);
    }

    /// Uniform double in [0, 1).
    constexpr double uniform() noexcept { return to_unit_interval(next()); }

    /// Uniform integer in [0, bound). Multiply-shift; bias is below 2^-32 for the bounds used here.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Independent seed for sub-stream `stream` of `base`: mix(base ^ (stream * 0xD1B54A32D192ED03)) run
/// through one SplitMix64 step.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    return splitmix_at(base ^ (stream * 0xD1B54A32D192ED03ULL), 0);
}

}  // namespace hodge
