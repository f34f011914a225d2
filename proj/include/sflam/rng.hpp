#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sflam {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128 random bits.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Counter-based generator: every draw is a pure function of (seed, stream, index).
///
/// Streams form a tree through child(); siblings are statistically independent,
/// so work split across threads draws the same numbers regardless of scheduling.
class CounterRng {
public:
    constexpr CounterRng() = default;
    constexpr explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : seed_(seed), stream_(stream) {}

    constexpr std::uint64_t seed() const noexcept { return seed_; }
    constexpr std::uint64_t stream() const noexcept { return stream_; }

    constexpr CounterRng child(std::uint64_t id) const noexcept {
        return CounterRng(seed_, splitmix64(stream_ ^ splitmix64(id ^ 0x5F1A5EEDull)));
    }

    std::uint64_t bits(std::uint64_t index) const noexcept {
        const auto out = philox4x32(
            {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
            {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
        return (std::uint64_t{out[0]} << 32) | out[1];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t index) const noexcept {
        return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t index, double lo, double hi) const noexcept {
        return lo + (hi - lo) * uniform(index);
    }

    /// Uniform integer in [lo, hi] (inclusive), by rejection-free multiply-shift.
    std::int64_t uniform_int(std::uint64_t index, std::int64_t lo, std::int64_t hi) const noexcept {
        const auto span = static_cast<unsigned __int128>(static_cast<std::uint64_t>(hi - lo) + 1u);
        const auto r = static_cast<std::uint64_t>((span * bits(index)) >> 64);
        return lo + static_cast<std::int64_t>(r);
    }

    /// Standard normal via Box-Muller on draws 2*index and 2*index+1.
    double normal(std::uint64_t index) const noexcept {
        const double u1 = 1.0 - uniform(2 * index);  // (0, 1]
        const double u2 = uniform(2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
};

} // namespace sflam
