#pragma once

#include <cstdint>

namespace ddcert {

/// Counter-based generator: SplitMix64 finalizer applied to a hashed
/// (seed, stream, index, lane) key. Every draw is a pure function of its key,
/// so sample i never depends on how many other samples were requested.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t bits(std::uint64_t index, std::uint64_t lane) const noexcept {
        return mix(key_ ^ mix(index ^ mix(lane + 0xd1b54a32d192ed03ULL)));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t index, std::uint64_t lane) const noexcept {
        return static_cast<double>(bits(index, lane) >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1].
    constexpr double uniform_open_low(std::uint64_t index, std::uint64_t lane) const noexcept {
        return static_cast<double>((bits(index, lane) >> 11) + 1) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
};

/// Stream tags keep training, validation and initialization draws disjoint
/// even when the same user seed is reused.
namespace streams {
inline constexpr std::uint64_t training = 0;
inline constexpr std::uint64_t validation = 1;
inline constexpr std::uint64_t parameters = 2;
}  // namespace streams

}  // namespace ddcert
