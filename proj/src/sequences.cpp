#include "pcorr/sequences.hpp"

#include "pcorr/rng.hpp"

#include <algorithm>

namespace pcorr {

std::string family_name(Family f) {
    switch (f) {
        case Family::polynomial: return "polynomial";
        case Family::lacunary: return "lacunary";
        case Family::quasi_arithmetic: return "quasi_arithmetic";
        case Family::sidon: return "sidon";
        case Family::custom: return "custom";
    }
    return "custom";
}

Family family_from_name(const std::string& s) {
    if (s == "polynomial" || s == "poly") return Family::polynomial;
    if (s == "lacunary") return Family::lacunary;
    if (s == "quasi_arithmetic" || s == "qa1") return Family::quasi_arithmetic;
    if (s == "sidon") return Family::sidon;
    if (s == "custom") return Family::custom;
    throw std::invalid_argument("unknown sequence family: '" + s + "'");
}

void IntSeq::check_invariants() const {
    if (values.empty()) throw std::invalid_argument("IntSeq: empty");
    if (values.front() < 1) throw std::invalid_argument("IntSeq: values must be >= 1");
    for (size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1])
            throw std::invalid_argument("IntSeq: values not strictly increasing at index " +
                                        std::to_string(i));
}

static Int eval_poly(const std::vector<Int>& coeffs, u64 n) {
    Int x(static_cast<unsigned long>(n));
    Int acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

IntSeq gen_polynomial(const std::vector<Int>& coeffs, u64 N) {
    if (N == 0) throw std::invalid_argument("gen_polynomial: N must be >= 1");
    if (coeffs.empty() || coeffs.back() <= 0)
        throw std::invalid_argument("gen_polynomial: leading coefficient must be > 0");
    IntSeq s;
    s.family = Family::polynomial;
    s.poly_coeffs = coeffs;
    s.values.reserve(N);
    for (u64 n = 1; n <= N; ++n) {
        Int v = eval_poly(coeffs, n);
        if (v < 1)
            throw std::invalid_argument("gen_polynomial: a(" + std::to_string(n) +
                                        ") = " + dec(v) + " < 1");
        if (!s.values.empty() && v <= s.values.back())
            throw std::invalid_argument("gen_polynomial: not strictly increasing on 1.." +
                                        std::to_string(N) + ": a(" + std::to_string(n) +
                                        ") = " + dec(v) + " <= a(" + std::to_string(n - 1) +
                                        ") = " + dec(s.values.back()));
        s.values.push_back(std::move(v));
    }
    return s;
}

IntSeq gen_lacunary(const Int& base, u64 N) {
    if (base < 2) throw std::invalid_argument("gen_lacunary: base must be >= 2");
    if (N == 0) throw std::invalid_argument("gen_lacunary: N must be >= 1");
    if (N > 20000)
        throw std::invalid_argument("gen_lacunary: N = " + std::to_string(N) +
                                    " exceeds desk-scale limit 20000 (value bit-length)");
    IntSeq s;
    s.family = Family::lacunary;
    s.lacunary_base = base;
    s.values.reserve(N);
    Int v = 1;
    for (u64 n = 1; n <= N; ++n) {
        v *= base;
        s.values.push_back(v);
    }
    return s;
}

IntSeq gen_quasi_arithmetic_deg1(const Rat& C, const Rat& K, const Int& step,
                                 const Int& base, u64 M, u64 N, u64 seed) {
    if (!(C > 0 && C <= 1)) throw std::invalid_argument("gen_quasi_arithmetic_deg1: C must be in (0,1]");
    if (K < 1) throw std::invalid_argument("gen_quasi_arithmetic_deg1: K must be >= 1");
    if (step < 1) throw std::invalid_argument("gen_quasi_arithmetic_deg1: step must be >= 1");
    if (base < 1) throw std::invalid_argument("gen_quasi_arithmetic_deg1: base must be >= 1");
    if (M == 0 || N == 0) throw std::invalid_argument("gen_quasi_arithmetic_deg1: M, N must be >= 1");
    if (M > N) throw std::invalid_argument("gen_quasi_arithmetic_deg1: block M must be <= N");

    Int members = ceil_rat(C * Rat(static_cast<unsigned long>(M)));   // ceil(C*M)
    Int span = count_below(K * Rat(static_cast<unsigned long>(M)));   // #{r : 0 <= r < K*M}
    if (members > span)
        throw std::invalid_argument("gen_quasi_arithmetic_deg1: infeasible: ceil(C*M) = " +
                                    dec(members) + " > progression slots " + dec(span));
    u64 m = to_u64(members);
    u64 slots = to_u64(span);

    SplitMix64 rng(seed);

    // m distinct offsets r in [0, slots), sorted ascending; partial
    // Fisher-Yates when a proper subset is needed.
    std::vector<u64> offs;
    offs.reserve(m);
    if (m == slots) {
        for (u64 r = 0; r < slots; ++r) offs.push_back(r);
    } else {
        std::vector<u64> pool(slots);
        for (u64 r = 0; r < slots; ++r) pool[r] = r;
        for (u64 j = 0; j < m; ++j) {
            u64 t = j + rng.below(slots - j);
            std::swap(pool[j], pool[t]);
        }
        offs.assign(pool.begin(), pool.begin() + m);
        std::sort(offs.begin(), offs.end());
    }

    IntSeq s;
    s.family = Family::quasi_arithmetic;
    s.qa = QaParams{C, K, step, base, M, seed};
    s.values.reserve(N);
    for (u64 r : offs) s.values.push_back(base + Int(static_cast<unsigned long>(r)) * step);

    // Fillers for the non-progression fraction of the block live strictly
    // between the progression span and twice the span, keeping the block
    // sorted with members first.
    Int span_top = base + Int(static_cast<unsigned long>(slots)) * step;  // first value above the window
    if (m < M) {
        u64 fill = M - m;
        Int width = span_top;  // fillers drawn from (span_top, 2*span_top]
        if (width < Int(static_cast<unsigned long>(fill)))
            throw std::invalid_argument("gen_quasi_arithmetic_deg1: infeasible: filler range too small");
        // sorted distinct values via increasing random walk
        Int lo = span_top;
        Int per = width / Int(static_cast<unsigned long>(fill));
        u64 perc = fits_u64(per) ? to_u64(per) : (u64(1) << 32);
        for (u64 j = 0; j < fill; ++j) {
            u64 stepw = perc > 1 ? rng.below(perc) : 0;
            lo += 1 + Int(static_cast<unsigned long>(stepw));
            s.values.push_back(lo);
        }
    }

    // Seeded sparse tail: with probability C continue the progression step,
    // otherwise jump ahead, so the full-progression case (C = 1) stays exact.
    u64 cnum = to_u64(C.get_num()), cden = to_u64(C.get_den());
    Int two_step = 2 * step;
    u64 jump_cap = fits_u64(two_step) ? to_u64(two_step) : (u64(1) << 32);
    while (s.values.size() < N) {
        Int next = s.values.back();
        if (rng.below(cden) < cnum) {
            next += step;
        } else {
            next += step + Int(static_cast<unsigned long>(1 + rng.below(jump_cap)));
        }
        s.values.push_back(next);
    }
    s.check_invariants();
    return s;
}

IntSeq gen_sidon_greedy(u64 N) {
    if (N == 0) throw std::invalid_argument("gen_sidon_greedy: N must be >= 1");
    IntSeq s;
    s.family = Family::sidon;
    std::vector<u64> a;
    a.reserve(N);
    std::vector<u64> used;  // bitset of used differences
    auto test = [&](u64 d) {
        u64 w = d >> 6;
        return w < used.size() && ((used[w] >> (d & 63)) & 1);
    };
    auto set = [&](u64 d) {
        u64 w = d >> 6;
        if (w >= used.size()) used.resize(w + 4096, 0);
        used[w] |= u64(1) << (d & 63);
    };
    u64 cand = 1;
    for (u64 n = 0; n < N; ++n) {
        for (;; ++cand) {
            bool ok = true;
            // newest elements first: small differences collide earliest
            for (size_t i = a.size(); i-- > 0;) {
                if (test(cand - a[i])) { ok = false; break; }
            }
            if (ok) break;
        }
        for (u64 x : a) set(cand - x);
        a.push_back(cand);
        ++cand;
    }
    s.values.reserve(N);
    for (u64 x : a) s.values.emplace_back(static_cast<unsigned long>(x));
    return s;
}

u64 qa_membership_count(const IntSeq& seq, u64 M) {
    if (!seq.qa) throw std::invalid_argument("qa_membership_count: sequence has no progression metadata");
    const QaParams& p = *seq.qa;
    Int span = count_below(p.K * Rat(static_cast<unsigned long>(M)));
    u64 upto = std::min<u64>(M, seq.size());
    u64 count = 0;
    for (u64 i = 0; i < upto; ++i) {
        const Int& v = seq.values[i];
        if (v < p.base) continue;
        Int d = v - p.base;
        if (d % p.step != 0) continue;
        if (d / p.step < span) ++count;
    }
    return count;
}

}  // namespace pcorr
