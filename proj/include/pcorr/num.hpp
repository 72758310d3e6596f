// Exact-arithmetic primitives shared by all modules: GMP integer/rational
// aliases plus the handful of fixed-point helpers the counting kernels need.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcorr {

using Int = mpz_class;
using Rat = mpq_class;

using u32 = uint32_t;
using u64 = uint64_t;
using i64 = int64_t;

// 2^bits
inline Int pow2(u32 bits) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, bits);
    return r;
}

// x mod 2^bits, result in [0, 2^bits)
inline Int mod_pow2(const Int& x, u32 bits) {
    Int r;
    mpz_fdiv_r_2exp(r.get_mpz_t(), x.get_mpz_t(), bits);
    return r;
}

// number of bits of |x|; bit_length(0) == 0
inline u32 bit_length(const Int& x) {
    if (x == 0) return 0;
    return static_cast<u32>(mpz_sizeinbase(x.get_mpz_t(), 2));
}

// floor(sqrt(x)), x >= 0
inline Int isqrt(const Int& x) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
    return r;
}

inline bool fits_u64(const Int& x) {
    return x >= 0 && mpz_sizeinbase(x.get_mpz_t(), 2) <= 64 &&
           mpz_fits_ulong_p(x.get_mpz_t());
}

inline u64 to_u64(const Int& x) {
    if (!fits_u64(x)) throw std::overflow_error("to_u64: value exceeds 64 bits");
    return mpz_get_ui(x.get_mpz_t());
}

inline Rat make_rat(const Int& num, const Int& den) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat make_rat(long num, long den) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// smallest integer >= q
inline Int ceil_rat(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// largest integer <= q
inline Int floor_rat(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

// #{r integer : 0 <= r < x} for rational x > 0, i.e. ceil(x) with integers
// mapping to themselves (an integer endpoint is excluded by the strict <).
inline Int count_below(const Rat& x) {
    if (x <= 0) return 0;
    return ceil_rat(x);
}

inline double to_double(const Rat& q) { return q.get_d(); }

inline std::string dec(const Int& x) { return x.get_str(10); }

// "n" or "n/d", canonical form
inline std::string dec(const Rat& q) {
    if (is_integer(q)) return q.get_num().get_str(10);
    return q.get_num().get_str(10) + "/" + q.get_den().get_str(10);
}

// Parses "123", "-4/7" or decimal strings like "0.25" into an exact rational.
Rat parse_rational(const std::string& s);

// Parses a decimal integer string.
inline Int parse_int(const std::string& s) {
    Int x;
    if (mpz_set_str(x.get_mpz_t(), s.c_str(), 10) != 0)
        throw std::invalid_argument("parse_int: not a decimal integer: '" + s + "'");
    return x;
}

}  // namespace pcorr
