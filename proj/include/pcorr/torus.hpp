// Exact torus arithmetic: alpha = X / 2^B for a B-bit integer X, points are
// raw B-bit integers (never floats), distances by wraparound minimum.
#pragma once

#include "pcorr/num.hpp"
#include "pcorr/sequences.hpp"

#include <string>
#include <vector>

namespace pcorr {

struct FixedPointAlpha {
    Int x;            // 0 <= x < 2^bits, alpha = x / 2^bits
    u32 bits;
    std::string provenance;  // "seed:<s>" | "sqrt:<D>" | "golden" | "rational:<p>/<q>"

    double approx() const { return Rat(x, pow2(bits)).get_d(); }
};

// Uniform alpha on [0,1) at B-bit resolution, reproducible from seed. B >= 64.
FixedPointAlpha alpha_random(u32 bits, u64 seed);

// alpha = frac(sqrt(D)) for non-square D, via exact integer square root of
// D * 2^(2B): X = isqrt(D << 2B) - isqrt(D) << B truncated to B bits.
FixedPointAlpha alpha_quadratic(const Int& D, u32 bits);

// alpha = (sqrt(5) - 1) / 2, the golden-ratio fractional part.
FixedPointAlpha alpha_golden(u32 bits);

// alpha = p/q truncated to B bits: X = floor(p * 2^B / q), 0 <= p < q.
FixedPointAlpha alpha_rational(const Int& p, const Int& q, u32 bits);

struct TorusPointSet {
    std::vector<Int> points;  // sorted ascending, each in [0, 2^bits)
    std::vector<u32> perm;    // perm[i] = original index of points[i]; may be
                              // empty after deserialization (order unknown)
    u32 bits = 0;

    u64 size() const { return points.size(); }
};

// Points {a(n) * alpha} computed exactly as (a(n) * X) mod 2^B, sorted with
// index map (ties broken by original index, so the layout is deterministic).
// Requires the guard-bit contract B >= bit_length(max a) + 64; rejects with
// the required B otherwise. Uses the first n_use values (0 = all).
TorusPointSet fractional_parts(const IntSeq& seq, const FixedPointAlpha& alpha,
                               u64 n_use = 0);

// Serial reference for the parallel product loop inside fractional_parts.
TorusPointSet fractional_parts_serial(const IntSeq& seq, const FixedPointAlpha& alpha,
                                      u64 n_use = 0);

// min(|x - y|, 2^B - |x - y|), in [0, 2^(B-1)]
Int torus_distance(const Int& x, const Int& y, u32 bits);

}  // namespace pcorr
