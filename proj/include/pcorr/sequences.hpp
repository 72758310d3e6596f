// Integer sequence generators: polynomial a(n), lacunary base^n, quasi-
// arithmetic degree-1 blocks, and a greedy Sidon control family. All values
// are exact big integers, materialized eagerly.
#pragma once

#include "pcorr/num.hpp"

#include <optional>
#include <vector>

namespace pcorr {

enum class Family { polynomial, lacunary, quasi_arithmetic, sidon, custom };

std::string family_name(Family f);
Family family_from_name(const std::string& s);

// Parameters of the declared degree-1 arithmetic progression of a
// quasi-arithmetic sequence: at block size M, at least ceil(C*M) of the
// first M values lie in { base + r*step : 0 <= r < K*M }.
struct QaParams {
    Rat C;       // density in (0, 1]
    Rat K;       // span factor >= 1
    Int step;    // progression step >= 1
    Int base;    // progression offset >= 1
    u64 block;   // block size M carrying the density guarantee
    u64 seed;
};

struct IntSeq {
    std::vector<Int> values;  // strictly increasing, all >= 1
    Family family = Family::custom;
    std::vector<Int> poly_coeffs;   // polynomial family only, ascending degree
    Int lacunary_base = 0;          // lacunary family only
    std::optional<QaParams> qa;     // quasi-arithmetic family only

    u64 size() const { return values.size(); }
    const Int& max_value() const { return values.back(); }

    // throws unless values are strictly increasing and >= 1
    void check_invariants() const;
};

// a(n) = coeffs[0] + coeffs[1]*n + ... evaluated at n = 1..N.
// Rejects non-positive leading coefficient and any non-monotone evaluation.
IntSeq gen_polynomial(const std::vector<Int>& coeffs, u64 N);

// a(n) = base^n, base >= 2, n = 1..N.
IntSeq gen_lacunary(const Int& base, u64 N);

// Quasi-arithmetic of degree 1: the first M values contain ceil(C*M) members
// of the declared progression; the rest of the block sits strictly above the
// progression span and the tail extends randomly (seeded) to length N while
// keeping strict monotonicity. With C = K = step = base = 1 the output is
// exactly 1..N. Extending N with fixed parameters is prefix-stable.
IntSeq gen_quasi_arithmetic_deg1(const Rat& C, const Rat& K, const Int& step,
                                 const Int& base, u64 M, u64 N, u64 seed);

// Greedy Sidon set (Mian-Chowla): repeatedly take the smallest integer that
// keeps all pairwise differences distinct. Starts 1, 2, 4, 8, 13, 21, ...
IntSeq gen_sidon_greedy(u64 N);

// Independent recount of the quasi-arithmetic membership guarantee.
// Returns the number of the first min(M, size) values lying in the declared
// progression window of span count_below(K*M).
u64 qa_membership_count(const IntSeq& seq, u64 M);

}  // namespace pcorr
