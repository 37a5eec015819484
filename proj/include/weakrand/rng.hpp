#pragma once

#include <cstdint>

namespace weakrand {

/// SplitMix64 (Steele, Lea & Flood). Each output is a pure function of
/// (seed, position), so independent streams are obtained by jumping to
/// disjoint positions and results do not depend on batching.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    explicit SplitMix64(std::uint64_t seed, std::uint64_t position = 0)
        : state_(seed + position * kGolden) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += kGolden);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace weakrand
