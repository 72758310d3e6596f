#include "pcorr/torus.hpp"

#include "pcorr/rng.hpp"

#include <algorithm>
#include <numeric>

#include <omp.h>

namespace pcorr {

FixedPointAlpha alpha_random(u32 bits, u64 seed) {
    if (bits < 64) throw std::invalid_argument("alpha_random: bits must be >= 64");
    SplitMix64 rng(seed);
    FixedPointAlpha a;
    a.bits = bits;
    a.x = rng.integer(bits);
    a.provenance = "seed:" + std::to_string(seed);
    return a;
}

FixedPointAlpha alpha_quadratic(const Int& D, u32 bits) {
    if (D <= 0) throw std::invalid_argument("alpha_quadratic: D must be positive");
    Int r = isqrt(D);
    if (r * r == D)
        throw std::invalid_argument("alpha_quadratic: D = " + dec(D) + " is a perfect square");
    // floor(sqrt(D) * 2^B) = isqrt(D * 2^(2B)); subtract the integer part.
    Int scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), D.get_mpz_t(), 2 * static_cast<unsigned long>(bits));
    FixedPointAlpha a;
    a.bits = bits;
    Int int_part_shifted;
    mpz_mul_2exp(int_part_shifted.get_mpz_t(), r.get_mpz_t(), bits);
    a.x = isqrt(scaled) - int_part_shifted;
    a.provenance = "sqrt:" + dec(D);
    return a;
}

FixedPointAlpha alpha_golden(u32 bits) {
    // (sqrt(5) - 1) / 2 scaled by 2^B: (isqrt(5 * 2^(2B)) - 2^B) >> 1
    Int scaled;
    Int five = 5;
    mpz_mul_2exp(scaled.get_mpz_t(), five.get_mpz_t(), 2 * static_cast<unsigned long>(bits));
    FixedPointAlpha a;
    a.bits = bits;
    a.x = (isqrt(scaled) - pow2(bits)) >> 1;
    a.provenance = "golden";
    return a;
}

FixedPointAlpha alpha_rational(const Int& p, const Int& q, u32 bits) {
    if (q <= 0 || p < 0 || p >= q)
        throw std::invalid_argument("alpha_rational: need 0 <= p < q");
    FixedPointAlpha a;
    a.bits = bits;
    Int num;
    mpz_mul_2exp(num.get_mpz_t(), p.get_mpz_t(), bits);
    a.x = num / q;
    a.provenance = "rational:" + dec(p) + "/" + dec(q);
    return a;
}

static void check_guard_bits(const IntSeq& seq, const FixedPointAlpha& alpha, u64 n_use) {
    const Int& maxv = seq.values[n_use - 1];
    u32 need = bit_length(maxv) + 64;
    if (alpha.bits < need)
        throw std::invalid_argument("fractional_parts: insufficient bits B = " +
                                    std::to_string(alpha.bits) + ", guard-bit contract requires B >= " +
                                    std::to_string(need));
}

static TorusPointSet sort_points(std::vector<Int>&& raw, u32 bits) {
    TorusPointSet ps;
    ps.bits = bits;
    u64 n = raw.size();
    std::vector<u32> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](u32 a, u32 b) {
        int c = mpz_cmp(raw[a].get_mpz_t(), raw[b].get_mpz_t());
        if (c != 0) return c < 0;
        return a < b;
    });
    ps.points.reserve(n);
    ps.perm.reserve(n);
    for (u32 i : idx) {
        ps.points.push_back(std::move(raw[i]));
        ps.perm.push_back(i);
    }
    return ps;
}

TorusPointSet fractional_parts(const IntSeq& seq, const FixedPointAlpha& alpha, u64 n_use) {
    if (n_use == 0) n_use = seq.size();
    if (n_use > seq.size())
        throw std::invalid_argument("fractional_parts: n_use exceeds sequence length");
    check_guard_bits(seq, alpha, n_use);
    std::vector<Int> raw(n_use);
#pragma omp parallel for schedule(static)
    for (i64 i = 0; i < static_cast<i64>(n_use); ++i)
        raw[i] = mod_pow2(seq.values[i] * alpha.x, alpha.bits);
    return sort_points(std::move(raw), alpha.bits);
}

TorusPointSet fractional_parts_serial(const IntSeq& seq, const FixedPointAlpha& alpha, u64 n_use) {
    if (n_use == 0) n_use = seq.size();
    if (n_use > seq.size())
        throw std::invalid_argument("fractional_parts: n_use exceeds sequence length");
    check_guard_bits(seq, alpha, n_use);
    std::vector<Int> raw(n_use);
    for (u64 i = 0; i < n_use; ++i)
        raw[i] = mod_pow2(seq.values[i] * alpha.x, alpha.bits);
    return sort_points(std::move(raw), alpha.bits);
}

Int torus_distance(const Int& x, const Int& y, u32 bits) {
    Int d = x >= y ? x - y : y - x;
    Int wrap = pow2(bits) - d;
    return d <= wrap ? d : wrap;
}

}  // namespace pcorr
