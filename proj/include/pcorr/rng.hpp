// Deterministic, platform-independent RNG used everywhere a --seed appears.
// SplitMix64: tiny state, full 64-bit output, passes BigCrush; every stream
// is reproducible from (seed) alone, independent of GMP internals.
#pragma once

#include "pcorr/num.hpp"

namespace pcorr {

struct SplitMix64 {
    u64 state;

    explicit SplitMix64(u64 seed) : state(seed) {}

    u64 next() {
        u64 z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, n), n >= 1, rejection-sampled (no modulo bias)
    u64 below(u64 n) {
        if (n == 0) throw std::invalid_argument("SplitMix64::below: n == 0");
        u64 threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            u64 r = next();
            if (r >= threshold) return (r % n);
        }
    }

    // uniform bits-bit integer on [0, 2^bits)
    Int integer(u32 bits) {
        Int x = 0;
        u32 words = (bits + 63) / 64;
        for (u32 w = 0; w < words; ++w) {
            Int limb(static_cast<unsigned long>(next()));
            x |= limb << (64 * w);
        }
        return mod_pow2(x, bits);
    }
};

// Stable per-index sub-seed for batch experiments (alpha sweeps etc.).
inline u64 derive_seed(u64 master, u64 index) {
    SplitMix64 g(master ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL));
    return g.next();
}

}  // namespace pcorr
