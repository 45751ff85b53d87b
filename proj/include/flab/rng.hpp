#pragma once

#include <cstdint>

namespace flab {

/// SplitMix64 generator (Steele, Lea & Flood). Chosen because its output is
/// fully specified by integer arithmetic, so sequences are bit-identical on
/// every platform — unlike the standard library distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in the half-open interval (0, 1]. Uses the top 53 bits
    /// of one 64-bit draw, so the mapping is exact and portable.
    double next_open_unit() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Seed for sub-stream k of a master stream: the k-th output of a
    /// SplitMix64 seeded with `seed`. The master state advances by a fixed
    /// increment per draw, so the k-th output is computable in O(1). This is
    /// the rule that lets sample k be generated independently of samples
    /// 0..k-1 (and hence in any order) without changing results.
    static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) {
        SplitMix64 master(seed + k * 0x9e3779b97f4a7c15ULL);
        return master.next();
    }

private:
    std::uint64_t state_;
};

}  // namespace flab
