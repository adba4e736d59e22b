#pragma once

#include <cstdint>

// Deterministic random streams built from pure 64-bit integer arithmetic, so
// that a (master_seed, stream_index) pair produces the same bytes on every
// platform and in every implementation language.
//
// Stream derivation, bit-exact:
//   seed0 = master_seed XOR (stream_index * 0xA24BAED4963EE407)
//   state = mix64(mix64(seed0))
//   s[k]  = k-th output of a SplitMix64 sequence started at state, k = 0..3
// and s[0..3] seed a xoshiro256++ generator. mix64 is the SplitMix64
// finalizer. Uniform doubles take the top 53 bits: (next() >> 11) * 2^-53.

namespace satphase {

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

    constexpr std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

  private:
    std::uint64_t state_;
};

class Xoshiro256pp {
  public:
    constexpr Xoshiro256pp(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3)
        : s_{s0, s1, s2, s3} {}

    constexpr std::uint64_t next() {
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

    // Uniform double in [0, 1), 53 significant bits.
    constexpr double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

inline constexpr std::uint64_t kStreamSalt = 0xA24BAED4963EE407ULL;

constexpr Xoshiro256pp derive_stream(SeedSpec seed) {
    const std::uint64_t seed0 = seed.master_seed ^ (seed.stream_index * kStreamSalt);
    SplitMix64 sm(mix64(mix64(seed0)));
    const std::uint64_t s0 = sm.next();
    const std::uint64_t s1 = sm.next();
    const std::uint64_t s2 = sm.next();
    const std::uint64_t s3 = sm.next();
    return Xoshiro256pp(s0, s1, s2, s3);
}

} // namespace satphase
