// Constructive level machinery for degree-1 quasi-arithmetic sequences:
//
//   level l:  subset A_l of the first M_l values inside the declared
//             progression window {base + r*kappa : 0 <= r < K*M_l},
//             |A_l| = s_l >= C*M_l;
//   V_l:      positive differences of A_l with multiplicities
//             (s_l(s_l-1)/2 >= c1*M_l^2 with c1 = C^2/4);
//   T_j^(l):  the ceil(c2/2 * M_l) largest difference values of
//             multiplicity >= c2*M_l, c2 = min(K, c1/(2K)); their offsets
//             R_j satisfy c2/2*M_l <= R_1 < ... < R_w < K*M_l;
//   growth:   strict mode picks M_l > (sum of all earlier T)^2, relaxed
//             mode drops the square (non-conforming, for exploration);
//   lambda:   the T values merged across levels, strictly increasing, with
//             psi_n = 1/M_l and tau_n = 1/l on level l.
//
// On top of the state: the new-fraction counts mu_n, the weighted divergence
// condition sum mu_n/lambda_n psi_n tau_n > c sum psi_n tau_n, hit finding
// ||lambda_n alpha|| <= psi_n, and the two-case non-Poissonian witness
// windows at M = K*M_l.
#pragma once

#include "pcorr/paircorr.hpp"
#include "pcorr/sequences.hpp"
#include "pcorr/torus.hpp"

#include <optional>
#include <vector>

namespace pcorr {

enum class GrowthMode { strict, relaxed };
std::string growth_mode_name(GrowthMode m);
GrowthMode growth_mode_from_name(const std::string& s);

struct LevelRecord {
    u64 M = 0;            // level size M_l
    Int kappa;            // progression step
    Int base;             // progression offset
    u64 s = 0;            // |A_l|
    std::vector<u64> R;   // selected offsets, ascending; T_j = R_j * kappa
    Rat mult_threshold;   // c2 * M_l

    u64 w() const { return R.size(); }
};

struct ConstructionState {
    Rat C, K;
    Rat c1, c2;       // c1 = C^2/4 (finite-safe), c2 = min(K, c1/(2K))
    double c4 = 0.0;  // K/2 * c(c2/(2K)), totient-average diagnostic constant
    GrowthMode mode = GrowthMode::strict;
    std::vector<LevelRecord> levels;
    QaParams qa;      // Definition-1 data; sequence prefixes regenerate from it
    u64 m1 = 0;
    u64 budget = 0;

    std::vector<Int> lambda;    // merged T values, strictly increasing
    std::vector<u32> level_of;  // 0-based level index per lambda entry

    u64 size() const { return lambda.size(); }
    Rat psi(u64 n) const;  // 1 / M_{l(n)}
    Rat tau(u64 n) const;  // 1 / (l(n) + 1)

    // regenerates the underlying sequence prefix (prefix-stable in n)
    IntSeq prefix(u64 n) const;

    void check_invariants() const;
};

// Multiplicities of positive offset-differences of a level subset given as
// progression offsets (strictly increasing, < span). Flat vector indexed by
// difference r in [0, span); total multiplicity is s(s-1)/2.
std::vector<u32> difference_multiset(const std::vector<u64>& offsets, u64 span);
std::vector<u32> difference_multiset_serial(const std::vector<u64>& offsets, u64 span);

// Value-level wrapper: validates that every element lies in the declared
// progression window and reduces to offsets.
std::vector<u32> difference_multiset(const std::vector<Int>& subset, const Int& base,
                                     const Int& kappa, u64 span);

// Independent multiplicity recount of a single difference r by two-pointer
// intersection of the offset list with its shift.
u64 diff_multiplicity_recount(const std::vector<u64>& offsets, u64 r);

// The ceil(c2/2 * M) largest offsets of multiplicity >= c2*M, ascending.
// Rejects (with the qualifying count in the message) when fewer than
// ceil(c2*M) offsets qualify.
std::vector<u64> select_top_values(const std::vector<u32>& multiset, u64 M, const Rat& c2);

// Builds L levels from Definition-1 data. Strict mode enforces
// M_l > (sum of earlier T)^2 exactly and rejects when the budget is hit.
ConstructionState build_levels(const QaParams& qa, u64 L, GrowthMode mode, u64 m1,
                               u64 budget = 200000);

// mu_n = #{0 < j < lambda_n : j/lambda_n is not k/lambda_q for any q < n}
// via the divisor identity: sum of phi(d) over divisors d >= 2 of lambda_n
// that divide no earlier lambda_q. Index n is 0-based.
u64 mu_exact(const ConstructionState& state, u64 n);

// Direct fraction enumeration oracle, lambda_n <= 10^4.
u64 mu_brute(const ConstructionState& state, u64 n);

struct StarReport {
    u64 N = 0;                     // prefix length used
    Rat lhs;                       // sum mu_n lambda_n^-1 psi_n tau_n
    Rat rhs;                       // sum psi_n tau_n
    Rat ratio;                     // lhs / rhs
    Rat c;                         // user threshold
    bool pass = false;             // lhs > c * rhs
    std::vector<u64> mu;           // per-index mu values
    std::vector<Rat> level_phi_avg;  // per level: 1/(2 M_l) sum phi(R_i)/R_i
    Rat sum_psi;                   // sum psi_n over the prefix
    Rat lhs_no_tau;                // sum mu_n lambda_n^-1 psi_n
    double c4 = 0.0;
    u64 mu_half_phi_violations = 0;  // indices with mu_n < phi(R)*kappa/2
};

StarReport verify_condition_star(const ConstructionState& state, u64 N, const Rat& c);

struct Hit {
    u64 index;   // 0-based position in lambda
    u32 level;   // 0-based
    Int lambda;
    Int nearest_m;  // integer nearest to lambda * alpha
    Int dist;       // raw B-bit value of ||lambda * alpha||
};

// All n in the built prefix with ||lambda_n alpha|| <= psi_n, distances
// exact in fixed point. Requires alpha.bits >= bit_length(max lambda) + 64.
std::vector<Hit> find_hits(const ConstructionState& state, const FixedPointAlpha& alpha);

struct WitnessReport {
    u64 hit_index = 0;
    u32 level = 0;
    u64 M_l = 0;
    u64 M = 0;          // window size floor(K * M_l)
    Rat rho;            // M_l * ||lambda alpha||
    bool rho_zero_case = false;
    bool inequality_holds = false;
    bool l0_caveat = false;  // set when the bound fails (small-level caveat)

    // rho = 0 case
    Rat s, r2, r2_bound;  // check r2 >= 4s

    // rho > 0 case
    Rat eps, s1, s2, lambda1, lambda2;
    Rat deviation;   // max(|Lambda2 - 2 s2|, |Lambda1 - 2 s1|)
    Rat dev_bound;   // c2 / (8K)
    Rat window_gain; // Lambda2 - Lambda1
};

// Deviation witness at scale M_l for one hit, following the two-case split
// on rho = M_l * ||lambda_n alpha|| (a single-scale report, not a limit).
WitnessReport witness_non_poissonian(const ConstructionState& state,
                                     const FixedPointAlpha& alpha, const Hit& hit);

}  // namespace pcorr
