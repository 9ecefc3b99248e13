#pragma once

// Splittable random streams. A stream is a pure function of (seed, keys...):
// the keys are folded through SplitMix64 to seed an xoshiro256++ state, so
// trial k's stream never depends on execution order or thread count.
// Distribution sampling is hand-rolled from raw bits to keep results
// bit-identical across standard libraries and platforms.

#include <cmath>
#include <cstdint>

namespace aseplab {

struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t key1 = 0, std::uint64_t key2 = 0) {
        SplitMix64 sm{seed};
        sm.state ^= sm.next() + key1;
        sm.state ^= sm.next() + (key2 << 1 | 1);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53 random bits.
    double u01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Exponential with the given rate; u01() < 1 keeps the log finite.
    double exponential(double rate) { return -std::log(1.0 - u01()) / rate; }

    bool bernoulli(double p) { return u01() < p; }

    // Uniform index in [0, n). Multiply-shift; bias is O(n / 2^64).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace aseplab
