#include "pcorr/construction.hpp"

#include "pcorr/totient.hpp"

#include <algorithm>
#include <atomic>

#include <omp.h>

namespace pcorr {

std::string growth_mode_name(GrowthMode m) {
    return m == GrowthMode::strict ? "strict" : "relaxed";
}

GrowthMode growth_mode_from_name(const std::string& s) {
    if (s == "strict") return GrowthMode::strict;
    if (s == "relaxed") return GrowthMode::relaxed;
    throw std::invalid_argument("unknown growth mode: '" + s + "'");
}

Rat ConstructionState::psi(u64 n) const {
    return make_rat(Int(1), Int(static_cast<unsigned long>(levels[level_of[n]].M)));
}

Rat ConstructionState::tau(u64 n) const {
    return make_rat(Int(1), Int(static_cast<unsigned long>(level_of[n] + 1)));
}

IntSeq ConstructionState::prefix(u64 n) const {
    u64 len = std::max<u64>(n, qa.block);
    IntSeq s = gen_quasi_arithmetic_deg1(qa.C, qa.K, qa.step, qa.base, qa.block, len, qa.seed);
    if (n < s.size()) s.values.resize(n);
    return s;
}

void ConstructionState::check_invariants() const {
    for (u64 n = 1; n < size(); ++n) {
        if (lambda[n] <= lambda[n - 1])
            throw std::logic_error("ConstructionState: lambda not strictly increasing at " +
                                   std::to_string(n));
        if (psi(n) > psi(n - 1)) throw std::logic_error("ConstructionState: psi increasing");
        if (tau(n) > tau(n - 1)) throw std::logic_error("ConstructionState: tau increasing");
    }
    Rat alt = Rat(c1 / (2 * K));
    Rat expect_c2 = K < alt ? K : alt;
    if (c2 != expect_c2) throw std::logic_error("ConstructionState: c2 != min(K, c1/(2K))");
}

std::vector<u32> difference_multiset_serial(const std::vector<u64>& offsets, u64 span) {
    std::vector<u32> counts(span, 0);
    u64 s = offsets.size();
    for (u64 i = 0; i < s; ++i)
        for (u64 j = i + 1; j < s; ++j) ++counts[offsets[j] - offsets[i]];
    return counts;
}

std::vector<u32> difference_multiset(const std::vector<u64>& offsets, u64 span) {
    u64 s = offsets.size();
    if (omp_get_max_threads() <= 1 || s < 2048) return difference_multiset_serial(offsets, span);
    std::vector<std::atomic<u32>> counts(span);
    for (auto& c : counts) c.store(0, std::memory_order_relaxed);
#pragma omp parallel for schedule(dynamic, 64)
    for (i64 i = 0; i < static_cast<i64>(s); ++i)
        for (u64 j = i + 1; j < s; ++j)
            counts[offsets[j] - offsets[i]].fetch_add(1, std::memory_order_relaxed);
    std::vector<u32> out(span);
    for (u64 k = 0; k < span; ++k) out[k] = counts[k].load(std::memory_order_relaxed);
    return out;
}

std::vector<u32> difference_multiset(const std::vector<Int>& subset, const Int& base,
                                     const Int& kappa, u64 span) {
    std::vector<u64> offsets;
    offsets.reserve(subset.size());
    for (size_t i = 0; i < subset.size(); ++i) {
        const Int& v = subset[i];
        if (i > 0 && v <= subset[i - 1])
            throw std::invalid_argument("difference_multiset: subset not strictly increasing");
        if (v < base || (v - base) % kappa != 0)
            throw std::invalid_argument("difference_multiset: element " + dec(v) +
                                        " outside declared progression");
        Int r = (v - base) / kappa;
        if (r >= Int(static_cast<unsigned long>(span)))
            throw std::invalid_argument("difference_multiset: element " + dec(v) +
                                        " outside progression window");
        offsets.push_back(to_u64(r));
    }
    return difference_multiset(offsets, span);
}

u64 diff_multiplicity_recount(const std::vector<u64>& offsets, u64 r) {
    // |A intersect (A + r)| over sorted offsets
    u64 count = 0;
    size_t i = 0, j = 0;
    while (i < offsets.size() && j < offsets.size()) {
        u64 shifted = offsets[j] + r;
        if (offsets[i] == shifted) { ++count; ++i; ++j; }
        else if (offsets[i] < shifted) ++i;
        else ++j;
    }
    return count;
}

// exact comparison  mult >= c2 * M  <=>  mult * c2_den >= c2_num * M
static bool meets_threshold(u64 mult, u64 M, const Rat& c2) {
    return Int(static_cast<unsigned long>(mult)) * c2.get_den() >=
           c2.get_num() * Int(static_cast<unsigned long>(M));
}

std::vector<u64> select_top_values(const std::vector<u32>& multiset, u64 M, const Rat& c2) {
    std::vector<u64> qualifying;
    for (u64 r = 1; r < multiset.size(); ++r)
        if (multiset[r] > 0 && meets_threshold(multiset[r], M, c2)) qualifying.push_back(r);

    Int need = ceil_rat(c2 * Rat(static_cast<unsigned long>(M)));
    if (Int(static_cast<unsigned long>(qualifying.size())) < need)
        throw std::invalid_argument("select_top_values: only " + std::to_string(qualifying.size()) +
                                    " offsets reach multiplicity >= c2*M, need " + dec(need) +
                                    " (C, K, c1 mis-calibrated at this scale)");

    u64 w = to_u64(ceil_rat(c2 / 2 * Rat(static_cast<unsigned long>(M))));
    if (w == 0) w = 1;
    std::vector<u64> top(qualifying.end() - std::min<size_t>(w, qualifying.size()),
                         qualifying.end());

    // selection lower bound: c2/2 * M <= R_1
    if (!(Rat(static_cast<unsigned long>(top.front())) >= c2 / 2 * Rat(static_cast<unsigned long>(M))))
        throw std::logic_error("select_top_values: R_1 below c2/2 * M");
    return top;
}

ConstructionState build_levels(const QaParams& qa, u64 L, GrowthMode mode, u64 m1, u64 budget) {
    if (L == 0) throw std::invalid_argument("build_levels: need at least one level");
    if (m1 < 2) throw std::invalid_argument("build_levels: m1 must be >= 2");

    ConstructionState st;
    st.C = qa.C;
    st.K = qa.K;
    st.c1 = qa.C * qa.C / 4;
    Rat c2_alt = Rat(st.c1 / (2 * st.K));
    st.c2 = st.K < c2_alt ? st.K : c2_alt;
    st.c4 = to_double(st.K) / 2.0 * c_of_delta(to_double(st.c2 / (2 * st.K)));
    st.mode = mode;
    st.qa = qa;
    st.m1 = m1;
    st.budget = budget;

    Int sum_T = 0;      // sum of all selected T values so far
    u64 prev_M = 0;

    for (u64 l = 0; l < L; ++l) {
        u64 M;
        if (l == 0) {
            M = m1;
        } else {
            Int bound;
            if (mode == GrowthMode::strict) {
                bound = sum_T * sum_T;  // squared growth rule
            } else {
                bound = sum_T;
                // keep T_1^(l+1) = R_1 * kappa > lambda_last: R_1 >= c2/2 * M
                Rat need = 2 * Rat(st.lambda.back()) / (st.c2 * Rat(qa.step));
                Int need_i = floor_rat(need);
                if (need_i > bound) bound = need_i;
            }
            if (bound < Int(static_cast<unsigned long>(prev_M))) bound = Int(static_cast<unsigned long>(prev_M));
            if (bound >= Int(static_cast<unsigned long>(budget)))
                throw std::overflow_error("build_levels: level " + std::to_string(l + 1) +
                                          " needs M > " + dec(bound) + ", over budget " +
                                          std::to_string(budget) +
                                          (mode == GrowthMode::strict
                                               ? " (try relaxed mode or a smaller m1)"
                                               : ""));
            M = to_u64(bound) + 1;
        }

        LevelRecord lev;
        lev.M = M;
        lev.kappa = qa.step;
        lev.base = qa.base;
        lev.mult_threshold = st.c2 * Rat(static_cast<unsigned long>(M));

        IntSeq seq = st.prefix(M);
        Int span_i = count_below(st.K * Rat(static_cast<unsigned long>(M)));
        u64 span = to_u64(span_i);

        std::vector<u64> offsets;
        offsets.reserve(M);
        for (u64 i = 0; i < M && i < seq.size(); ++i) {
            const Int& v = seq.values[i];
            if (v < qa.base) continue;
            Int d = v - qa.base;
            if (d % qa.step != 0) continue;
            Int r = d / qa.step;
            if (r < span_i) offsets.push_back(to_u64(r));
        }
        lev.s = offsets.size();

        // |A_l| >= C * M_l, checked not assumed
        if (!(Rat(static_cast<unsigned long>(lev.s)) >= st.C * Rat(static_cast<unsigned long>(M))))
            throw std::invalid_argument("build_levels: level " + std::to_string(l + 1) + " has s = " +
                                        std::to_string(lev.s) + " members < C*M = " +
                                        dec(st.C * Rat(static_cast<unsigned long>(M))));
        // |V~_l| = s(s-1)/2 >= c1 * M^2 (finite-safe c1 = C^2/4 needs M >= 2/C)
        Rat pair_count = Rat(Int(static_cast<unsigned long>(lev.s)) * Int(static_cast<unsigned long>(lev.s - 1)), Int(2));
        if (!(pair_count >= st.c1 * Rat(static_cast<unsigned long>(M)) * Rat(static_cast<unsigned long>(M))))
            throw std::invalid_argument("build_levels: level " + std::to_string(l + 1) +
                                        " difference multiset below c1*M^2 (M too small for C)");

        std::vector<u32> multiset = difference_multiset(offsets, span);
        lev.R = select_top_values(multiset, M, st.c2);

        // multiplicity at most s_l
        for (u64 r : lev.R)
            if (multiset[r] > lev.s)
                throw std::logic_error("build_levels: multiplicity exceeds s_l");

        // selection upper bound: R_w < K * M_l
        if (!(Rat(static_cast<unsigned long>(lev.R.back())) < st.K * Rat(static_cast<unsigned long>(M))))
            throw std::logic_error("build_levels: R_w >= K * M_l");

        // merge T = R * kappa into lambda; strict increase across the boundary
        for (u64 r : lev.R) {
            Int T = Int(static_cast<unsigned long>(r)) * qa.step;
            if (!st.lambda.empty() && T <= st.lambda.back())
                throw std::invalid_argument("build_levels: lambda not strictly increasing at level " +
                                            std::to_string(l + 1) + " (T = " + dec(T) +
                                            " <= " + dec(st.lambda.back()) + ")");
            st.lambda.push_back(std::move(T));
            st.level_of.push_back(static_cast<u32>(l));
            sum_T += st.lambda.back();
        }

        st.levels.push_back(std::move(lev));
        prev_M = M;
    }

    st.check_invariants();
    return st;
}

// --- mu ----------------------------------------------------------------------

namespace {

// divisors of x with their totients, via trial-division factorization
std::vector<std::pair<u64, u64>> divisors_with_phi(u64 x) {
    std::vector<std::pair<u64, u64>> divs = {{1, 1}};
    u64 rem = x;
    for (u64 p = 2; p * p <= rem; ++p) {
        if (rem % p) continue;
        u64 e = 0;
        while (rem % p == 0) { rem /= p; ++e; }
        size_t base_count = divs.size();
        u64 pk = 1, phi_pk = 1;
        for (u64 k = 1; k <= e; ++k) {
            phi_pk = (k == 1) ? p - 1 : phi_pk * p;
            pk *= p;
            for (size_t i = 0; i < base_count; ++i)
                divs.emplace_back(divs[i].first * pk, divs[i].second * phi_pk);
        }
    }
    if (rem > 1) {
        size_t base_count = divs.size();
        for (size_t i = 0; i < base_count; ++i)
            divs.emplace_back(divs[i].first * rem, divs[i].second * (rem - 1));
    }
    return divs;
}

}  // namespace

u64 mu_exact(const ConstructionState& state, u64 n) {
    if (n >= state.size()) throw std::invalid_argument("mu_exact: index out of range");
    if (!fits_u64(state.lambda[n]))
        throw std::overflow_error("mu_exact: lambda exceeds 64 bits");
    u64 ln = to_u64(state.lambda[n]);
    // a reduced fraction j/lambda_n has denominator d | lambda_n, d >= 2, and
    // is old exactly when d divides some earlier lambda_q
    u64 mu = 0;
    for (const auto& [d, phi_d] : divisors_with_phi(ln)) {
        if (d == 1) continue;
        bool old = false;
        for (u64 q = 0; q < n; ++q) {
            if (mpz_divisible_ui_p(state.lambda[q].get_mpz_t(), d)) { old = true; break; }
        }
        if (!old) mu += phi_d;
    }
    return mu;
}

u64 mu_brute(const ConstructionState& state, u64 n) {
    if (n >= state.size()) throw std::invalid_argument("mu_brute: index out of range");
    if (!fits_u64(state.lambda[n]) || to_u64(state.lambda[n]) > 10000)
        throw std::invalid_argument("mu_brute: oracle limited to lambda <= 10^4");
    u64 ln = to_u64(state.lambda[n]);
    std::vector<u64> earlier_mod;
    earlier_mod.reserve(n);
    for (u64 q = 0; q < n; ++q)
        earlier_mod.push_back(mpz_fdiv_ui(state.lambda[q].get_mpz_t(), ln));
    u64 mu = 0;
    for (u64 j = 1; j < ln; ++j) {
        bool old = false;
        for (u64 lq : earlier_mod) {
            // j/lambda_n = k/lambda_q for integer k  <=>  lambda_n | j*lambda_q
            if ((j * lq) % ln == 0) { old = true; break; }
        }
        if (!old) ++mu;
    }
    return mu;
}

StarReport verify_condition_star(const ConstructionState& state, u64 N, const Rat& c) {
    if (N == 0 || N > state.size())
        throw std::invalid_argument("verify_condition_star: N out of built prefix");
    StarReport rep;
    rep.N = N;
    rep.c = c;
    rep.c4 = state.c4;
    rep.lhs = Rat(0);
    rep.rhs = Rat(0);
    rep.sum_psi = Rat(0);
    rep.lhs_no_tau = Rat(0);
    rep.mu.reserve(N);

    u64 max_R = 0;
    for (const auto& lev : state.levels)
        if (!lev.R.empty()) max_R = std::max(max_R, lev.R.back());
    std::vector<u32> phi = totient_sieve(max_R);

    for (u64 n = 0; n < N; ++n) {
        u64 mu = mu_exact(state, n);
        rep.mu.push_back(mu);
        Rat psi = state.psi(n);
        Rat tau = state.tau(n);
        Rat term = make_rat(Int(static_cast<unsigned long>(mu)), Int(1)) / Rat(state.lambda[n]);
        rep.lhs += term * psi * tau;
        rep.rhs += psi * tau;
        rep.sum_psi += psi;
        rep.lhs_no_tau += term * psi;

        // asymptotic per-index bound mu_n >= phi(R)*kappa/2 (holds for large
        // levels only);
        // count violations instead of asserting
        u32 lev = state.level_of[n];
        u64 R = to_u64(state.lambda[n] / state.levels[lev].kappa);
        Rat half_phi_kappa = Rat(Int(static_cast<unsigned long>(phi[R])) * state.levels[lev].kappa, Int(2));
        if (Rat(Int(static_cast<unsigned long>(mu))) < half_phi_kappa) ++rep.mu_half_phi_violations;
    }
    rep.ratio = rep.rhs != 0 ? rep.lhs / rep.rhs : Rat(0);
    rep.pass = rep.lhs > c * rep.rhs;

    for (const auto& lev : state.levels) {
        Rat g(0);
        for (u64 r : lev.R)
            g += make_rat(Int(static_cast<unsigned long>(phi[r])), Int(static_cast<unsigned long>(r)));
        g /= 2 * Rat(static_cast<unsigned long>(lev.M));
        rep.level_phi_avg.push_back(g);
    }
    return rep;
}

std::vector<Hit> find_hits(const ConstructionState& state, const FixedPointAlpha& alpha) {
    u32 need = bit_length(state.lambda.back()) + 64;
    if (alpha.bits < need)
        throw std::invalid_argument("find_hits: alpha needs bits >= " + std::to_string(need));
    Int two_B = pow2(alpha.bits);
    Int half = pow2(alpha.bits - 1);
    std::vector<Hit> hits;
    for (u64 n = 0; n < state.size(); ++n) {
        Int prod = state.lambda[n] * alpha.x;
        Int v = mod_pow2(prod, alpha.bits);
        Int q = prod >> alpha.bits;
        Int d, m;
        if (v <= half) { d = v; m = q; }
        else { d = two_B - v; m = q + 1; }
        // hit iff d / 2^B <= psi_n = 1/M_l  <=>  d * M_l <= 2^B
        u64 M_l = state.levels[state.level_of[n]].M;
        if (d * Int(static_cast<unsigned long>(M_l)) <= two_B)
            hits.push_back(Hit{n, state.level_of[n], state.lambda[n], m, d});
    }
    return hits;
}

WitnessReport witness_non_poissonian(const ConstructionState& state,
                                     const FixedPointAlpha& alpha, const Hit& hit) {
    WitnessReport rep;
    rep.hit_index = hit.index;
    rep.level = hit.level;
    const LevelRecord& lev = state.levels[hit.level];
    rep.M_l = lev.M;
    Int M_i = floor_rat(state.K * Rat(static_cast<unsigned long>(lev.M)));
    rep.M = to_u64(M_i);

    Int two_B = pow2(alpha.bits);
    rep.rho = make_rat(hit.dist * Int(static_cast<unsigned long>(lev.M)), two_B);

    IntSeq seq = state.prefix(rep.M);
    if (seq.size() < rep.M)
        throw std::invalid_argument("witness: sequence prefix of length " + std::to_string(rep.M) +
                                    " unavailable");
    TorusPointSet points = fractional_parts(seq, alpha, rep.M);

    Rat c2 = state.c2, K = state.K;
    Rat rho_zero_bound = c2 / (4 * K * K);

    if (rep.rho < rho_zero_bound) {
        rep.rho_zero_case = true;
        rep.s = c2 / (4 * K);
        rep.r2 = r2_fast(points, rep.s);
        rep.r2_bound = 4 * rep.s;  // = c2 / K
        rep.inequality_holds = rep.r2 >= rep.r2_bound;
    } else {
        rep.rho_zero_case = false;
        Rat eps_a = Rat(rep.rho / 2), eps_b = Rat(c2 / (8 * K * K));
        rep.eps = eps_a < eps_b ? eps_a : eps_b;
        rep.s1 = K * (rep.rho - rep.eps);
        rep.s2 = K * (rep.rho + rep.eps);
        rep.lambda1 = r2_fast(points, rep.s1);
        rep.lambda2 = r2_fast(points, rep.s2);
        Rat d2 = rep.lambda2 - 2 * rep.s2;
        if (d2 < 0) d2 = -d2;
        Rat d1 = rep.lambda1 - 2 * rep.s1;
        if (d1 < 0) d1 = -d1;
        rep.deviation = std::max(d1, d2);
        rep.dev_bound = c2 / (8 * K);
        rep.window_gain = rep.lambda2 - rep.lambda1;
        rep.inequality_holds = rep.deviation >= rep.dev_bound;
    }
    rep.l0_caveat = !rep.inequality_holds;
    return rep;
}

}  // namespace pcorr
