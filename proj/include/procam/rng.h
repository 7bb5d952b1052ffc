// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_RNG_H
#define PROCAM_RNG_H

#include <cstdint>
#include <initializer_list>

namespace procam {

// splitmix64 finalizer.
constexpr uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive hash of a key tuple; streams are derived from
// (seed, pixel, sample) so results do not depend on scheduling.
constexpr uint64_t hash_keys(std::initializer_list<uint64_t> keys) {
    uint64_t h = 0x6a09e667f3bcc909ULL;
    for (uint64_t k : keys) h = mix64(h ^ mix64(k));
    return h;
}

// PCG32 (O'Neill), XSH-RR variant.
class Rng {
public:
    explicit Rng(uint64_t stream_key) {
        inc_ = (mix64(stream_key ^ 0xda3e39cb94b95bdbULL) << 1u) | 1u;
        state_ = 0;
        next_u32();
        state_ += mix64(stream_key);
        next_u32();
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        auto xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        auto rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31u));
    }

    // Uniform in [0, 1).
    double uniform() {
        uint64_t hi = next_u32();
        uint64_t lo = next_u32();
        return static_cast<double>(((hi << 21) ^ lo) & ((1ULL << 53) - 1)) * 0x1.0p-53;
    }

private:
    uint64_t state_;
    uint64_t inc_;
};

}  // namespace procam

#endif  // PROCAM_RNG_H
