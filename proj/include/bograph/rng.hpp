#pragma once

#include <cstdint>

namespace bograph {

// SplitMix64 output mix (Steele/Lea/Flood, constants by Vigna).
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based 64-bit generator: the state is a plain counter advanced by
// the golden-ratio increment, the output is a bijective mix of it. All
// integer arithmetic, so sequences are identical on every platform.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t operator()() noexcept {
        return mix64(state_ += 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() noexcept {
        return double((*this)() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, n). Lemire's multiply-shift with
    /// rejection, so the result is exactly uniform for any n.
    std::uint64_t next_below(std::uint64_t n) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ULL; }

private:
    std::uint64_t state_;
};

// Substream seed for replica `index`: hash of (seed, index). Replicas drawn
// from substreams are reproducible no matter how work is scheduled.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

} // namespace bograph
