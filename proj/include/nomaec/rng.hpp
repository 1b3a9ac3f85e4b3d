#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace nomaec {

/// Seed for a reproducible random stream. The same seed and the same request
/// sequence produce a bit-identical stream on every platform.
struct RngSeed {
    std::uint64_t value = 0;
};

namespace detail {

// splitmix64, used only to expand seeds into generator state.
// https://prng.di.unimi.it/splitmix64.c
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// xoshiro256++ 1.0 (https://prng.di.unimi.it/xoshiro256plusplus.c).
/// Chosen over std::mt19937_64 for cheap state, trivial seeding of many
/// independent streams, and a specified bit-exact output sequence.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        detail::SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    /// Stream `stream` derived from a master seed. Distinct stream indices
    /// give statistically independent generators; used to hand one stream to
    /// each Monte-Carlo sample block.
    static Xoshiro256pp for_stream(RngSeed seed, std::uint64_t stream) {
        return Xoshiro256pp(seed.value ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    }

    std::uint64_t next() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in (0, 1], 53 random bits.
    double uniform_pos() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Unit-mean exponential variate via inverse CDF x = -ln(u), u in (0,1].
    double exponential() { return -std::log(uniform_pos()); }

private:
    std::array<std::uint64_t, 4> state_;
};

}  // namespace nomaec
