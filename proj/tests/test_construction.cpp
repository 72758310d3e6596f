#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcorr/construction.hpp"
#include "pcorr/rng.hpp"
#include "pcorr/totient.hpp"

#include <set>

using namespace pcorr;

namespace {

QaParams full_ap() {
    // C = K = 1, step 1, base 1: the sequence is 1, 2, 3, ...
    return QaParams{Rat(1), Rat(1), Int(1), Int(1), /*block=*/8, /*seed=*/0};
}

ConstructionState fake_state(std::vector<unsigned long> lambda) {
    ConstructionState st;
    for (auto l : lambda) {
        st.lambda.emplace_back(l);
        st.level_of.push_back(0);
    }
    LevelRecord lev;
    lev.M = 10;
    lev.kappa = 1;
    lev.base = 1;
    st.levels.push_back(lev);
    return st;
}

}  // namespace

TEST_CASE("difference multiset: full AP hand example") {
    // subset {a, a+k, a+2k}: difference k twice, 2k once
    auto counts = difference_multiset({Int(5), Int(12), Int(19)}, Int(5), Int(7), 3);
    REQUIRE(counts.size() == 3);
    CHECK(counts[1] == 2);
    CHECK(counts[2] == 1);

    // element outside the declared progression is rejected
    CHECK_THROWS_AS(difference_multiset({Int(5), Int(13)}, Int(5), Int(7), 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(difference_multiset({Int(5), Int(40)}, Int(5), Int(7), 3),
                    std::invalid_argument);  // offset 5 >= span 3
}

TEST_CASE("difference multiset: total count and multiplicity bound") {
    SplitMix64 rng(4);
    for (int t = 0; t < 20; ++t) {
        u64 span = 20 + rng.below(200);
        std::set<u64> offs;
        u64 s = 2 + rng.below(span - 2);
        while (offs.size() < s) offs.insert(rng.below(span));
        std::vector<u64> offsets(offs.begin(), offs.end());
        auto counts = difference_multiset(offsets, span);
        u64 total = 0;
        for (u64 r = 0; r < span; ++r) {
            total += counts[r];
            REQUIRE(counts[r] <= s);  // multiplicity at most s_l
            // independent recount by shifted intersection
            REQUIRE(counts[r] == (r == 0 ? 0 : diff_multiplicity_recount(offsets, r)));
        }
        REQUIRE(total == s * (s - 1) / 2);
    }
}

TEST_CASE("difference multiset: serial and parallel kernels agree") {
    std::vector<u64> offsets;
    for (u64 i = 0; i < 5000; ++i) offsets.push_back(i * 2);
    CHECK(difference_multiset(offsets, 10000) == difference_multiset_serial(offsets, 10000));
}

TEST_CASE("select_top_values: M = 10 full AP enumeration") {
    // multiplicities 10 - r; threshold c2 = 1/4: r <= 7 qualify, take the
    // ceil(1.25) = 2 largest -> {6, 7}
    std::vector<u64> offsets;
    for (u64 i = 0; i < 10; ++i) offsets.push_back(i);
    auto counts = difference_multiset(offsets, 10);
    auto top = select_top_values(counts, 10, make_rat(1, 4));
    CHECK(top == std::vector<u64>{6, 7});
}

TEST_CASE("select_top_values: insufficient qualifying values rejected with count") {
    // two elements: single difference of multiplicity 1; c2*M = 5 unreachable
    std::vector<u64> offsets{0, 3};
    auto counts = difference_multiset(offsets, 10);
    CHECK_THROWS_WITH_AS(select_top_values(counts, 10, make_rat(1, 2)),
                         doctest::Contains("mis-calibrated"), std::invalid_argument);
}

TEST_CASE("build_levels strict: frozen 3-level structure for the full AP") {
    ConstructionState st = build_levels(full_ap(), 3, GrowthMode::strict, 8);
    st.check_invariants();

    CHECK(st.c1 == make_rat(1, 4));
    CHECK(st.c2 == make_rat(1, 8));

    REQUIRE(st.levels.size() == 3);
    // level 1: M = 8, all differences qualify (threshold 1), top 1 is {7}
    CHECK(st.levels[0].M == 8);
    CHECK(st.levels[0].s == 8);
    CHECK(st.levels[0].R == std::vector<u64>{7});
    // level 2: M > 7^2 -> 50; threshold 6.25; qualifying r <= 43; w = 4
    CHECK(st.levels[1].M == 50);
    CHECK(st.levels[1].R == std::vector<u64>{40, 41, 42, 43});
    // level 3: M > (7+40+41+42+43)^2 = 29929 -> 29930; w = ceil(29930/16)
    CHECK(st.levels[2].M == 29930);
    CHECK(st.levels[2].R.size() == 1871);
    CHECK(st.levels[2].R.front() == 24318);
    CHECK(st.levels[2].R.back() == 26188);

    // lambda merged and strictly increasing across boundaries
    REQUIRE(st.size() == 1 + 4 + 1871);
    CHECK(st.lambda[0] == 7);
    CHECK(st.lambda[1] == 40);
    CHECK(st.lambda[5] == 24318);

    // selection bounds at every level: c2/2 M <= R_1 < ... < R_w < K M
    for (const auto& lev : st.levels) {
        REQUIRE(Rat((unsigned long)lev.R.front()) >= st.c2 / 2 * Rat((unsigned long)lev.M));
        REQUIRE(Rat((unsigned long)lev.R.back()) < st.K * Rat((unsigned long)lev.M));
        for (size_t i = 1; i < lev.R.size(); ++i) REQUIRE(lev.R[i - 1] < lev.R[i]);
        // w >= c2/2 M
        REQUIRE(Rat((unsigned long)lev.w()) >= st.c2 / 2 * Rat((unsigned long)lev.M));
    }

    // strict growth rule: M_l > (sum of all earlier T)^2
    Int sum_T = 0;
    for (size_t l = 0; l + 1 < st.levels.size(); ++l) {
        for (u64 r : st.levels[l].R) sum_T += Int((unsigned long)r) * st.levels[l].kappa;
        REQUIRE(Int((unsigned long)st.levels[l + 1].M) > sum_T * sum_T);
    }

    // sum psi >= sum w_l / M_l >= L * c2 / 2
    Rat sum_psi(0);
    for (u64 n = 0; n < st.size(); ++n) sum_psi += st.psi(n);
    CHECK(sum_psi >= Rat(3) * st.c2 / 2);
}

TEST_CASE("build_levels: selected multiplicities recounted independently") {
    ConstructionState st = build_levels(full_ap(), 3, GrowthMode::strict, 8);
    for (const auto& lev : st.levels) {
        std::vector<u64> offsets;
        for (u64 i = 0; i < lev.M; ++i) offsets.push_back(i);  // full AP offsets
        for (u64 r : lev.R) {
            u64 mult = diff_multiplicity_recount(offsets, r);
            REQUIRE(Rat((unsigned long)mult) >= lev.mult_threshold);
            REQUIRE(mult == lev.M - r);  // closed form for the full AP
        }
    }
}

TEST_CASE("build_levels strict: budget guard recommends relaxed mode") {
    CHECK_THROWS_WITH_AS(build_levels(full_ap(), 3, GrowthMode::strict, 16),
                         doctest::Contains("relaxed"), std::overflow_error);
}

TEST_CASE("build_levels relaxed: non-conforming growth still yields a valid state") {
    ConstructionState st = build_levels(full_ap(), 4, GrowthMode::relaxed, 8);
    st.check_invariants();
    CHECK(st.mode == GrowthMode::relaxed);
    CHECK(growth_mode_name(st.mode) == "relaxed");
    REQUIRE(st.levels.size() == 4);
    // un-squared growth: M_2 only needs to clear sum T and the lambda chain
    CHECK(st.levels[1].M < 50 * 50);
    for (u64 n = 1; n < st.size(); ++n) REQUIRE(st.lambda[n] > st.lambda[n - 1]);
}

TEST_CASE("build_levels: density precondition checked, not assumed") {
    // C = 0.9 declared but the sequence only guarantees it at block size 8;
    // at larger level sizes the tail dilutes membership below 0.9
    QaParams qa{make_rat(9, 10), Rat(1), Int(1), Int(1), 8, 5};
    CHECK_THROWS_AS(build_levels(qa, 3, GrowthMode::strict, 8), std::invalid_argument);
}

TEST_CASE("mu: first index counts lambda - 1 fractions") {
    auto st = fake_state({7});
    CHECK(mu_exact(st, 0) == 6);
    CHECK(mu_brute(st, 0) == 6);
}

TEST_CASE("mu: frozen example lambda = (2, 4)") {
    auto st = fake_state({2, 4});
    // fractions 1/4, 3/4 are new; 2/4 = 1/2 is old
    CHECK(mu_exact(st, 1) == 2);
    CHECK(mu_brute(st, 1) == 2);
}

TEST_CASE("mu: divisor identity equals brute enumeration on random prefixes") {
    SplitMix64 rng(12);
    for (int t = 0; t < 500; ++t) {
        u64 len = 1 + rng.below(8);
        std::set<u64> vals;
        while (vals.size() < len) vals.insert(2 + rng.below(9998));
        std::vector<unsigned long> lambda(vals.begin(), vals.end());
        auto st = fake_state(lambda);
        u64 n = st.size() - 1;
        REQUIRE(mu_exact(st, n) == mu_brute(st, n));
    }
}

TEST_CASE("condition (*): exact sums, ratio, and scaling bounds") {
    ConstructionState st = build_levels(full_ap(), 3, GrowthMode::strict, 8);
    StarReport rep = verify_condition_star(st, st.size(), make_rat(1, 10));

    // hand-checked mu values for lambda = 7, 40, 41, 42, 43
    CHECK(rep.mu[0] == 6);
    CHECK(rep.mu[1] == 39);
    CHECK(rep.mu[2] == 40);
    CHECK(rep.mu[3] == 34);  // divisors 7 (from lambda_1) and 2 (from 40) are old
    CHECK(rep.mu[4] == 42);

    CHECK(rep.lhs > 0);
    CHECK(rep.rhs > 0);
    CHECK(rep.ratio == rep.lhs / rep.rhs);
    CHECK(rep.pass);  // ratio ~0.84 > 0.1

    // sum psi tau <= K * H_L exactly (w_l <= K M_l)
    Rat harmonic = Rat(1) + make_rat(1, 2) + make_rat(1, 3);
    CHECK(rep.rhs <= st.K * harmonic);

    REQUIRE(rep.level_phi_avg.size() == 3);
    // level 1: (1/16) phi(7)/7 = 3/56
    CHECK(rep.level_phi_avg[0] == make_rat(3, 56));
    for (const Rat& g : rep.level_phi_avg) CHECK(g > 0);

    CHECK_THROWS_AS(verify_condition_star(st, 0, Rat(1)), std::invalid_argument);
}

TEST_CASE("condition (*): left side accumulates across level prefixes") {
    ConstructionState st = build_levels(full_ap(), 3, GrowthMode::strict, 8);
    // prefix lengths at the level boundaries: w1, w1+w2, w1+w2+w3
    u64 n1 = st.levels[0].w();
    u64 n2 = n1 + st.levels[1].w();
    u64 n3 = n2 + st.levels[2].w();
    Rat c(0);
    Rat l1 = verify_condition_star(st, n1, c).lhs;
    Rat l2 = verify_condition_star(st, n2, c).lhs;
    Rat l3 = verify_condition_star(st, n3, c).lhs;
    CHECK(l1 > 0);
    CHECK(l2 > l1);
    CHECK(l3 > l2);
}

TEST_CASE("find_hits: alpha = 0 hits everywhere, alpha = 1/2 hits even lambda") {
    ConstructionState st = build_levels(full_ap(), 2, GrowthMode::strict, 8);
    FixedPointAlpha zero{Int(0), 128, "rational:0/1"};
    auto hits = find_hits(st, zero);
    CHECK(hits.size() == st.size());

    FixedPointAlpha half = alpha_rational(Int(1), Int(2), 128);
    auto h2 = find_hits(st, half);
    std::set<u64> hit_idx;
    for (const auto& h : h2) hit_idx.insert(h.index);
    for (u64 n = 0; n < st.size(); ++n) {
        bool even = st.lambda[n] % 2 == 0;
        if (even) {
            REQUIRE(hit_idx.count(n));  // exact multiple: distance 0
        } else {
            REQUIRE(!hit_idx.count(n));  // distance 1/2 > psi
        }
    }

    FixedPointAlpha narrow = alpha_random(64, 1);
    CHECK_THROWS_AS(find_hits(st, narrow), std::invalid_argument);
}

TEST_CASE("hit fraction grows with available levels") {
    ConstructionState one = build_levels(full_ap(), 1, GrowthMode::strict, 8);
    ConstructionState three = build_levels(full_ap(), 3, GrowthMode::strict, 8);
    u64 hits1 = 0, hits3 = 0;
    for (u64 i = 0; i < 50; ++i) {
        FixedPointAlpha a = alpha_random(128, derive_seed(77, i));
        if (!find_hits(one, a).empty()) ++hits1;
        if (!find_hits(three, a).empty()) ++hits3;
    }
    CHECK(hits3 >= hits1);  // lambda prefix of one state is contained in the other
    CHECK(hits3 > 0);
}

TEST_CASE("witness: exact-zero hit (alpha = 1/4) takes the rho = 0 branch") {
    ConstructionState st = build_levels(full_ap(), 2, GrowthMode::strict, 8);
    FixedPointAlpha quarter = alpha_rational(Int(1), Int(4), 128);
    auto hits = find_hits(st, quarter);
    REQUIRE(!hits.empty());
    bool saw_lambda40 = false;
    for (const auto& h : hits) {
        if (h.lambda == 40) {
            saw_lambda40 = true;
            CHECK(h.dist == 0);
            WitnessReport rep = witness_non_poissonian(st, quarter, h);
            CHECK(rep.rho_zero_case);
            CHECK(rep.rho == 0);
            CHECK(rep.M == 50);
            CHECK(rep.r2_bound == 4 * rep.s);
            CHECK(rep.inequality_holds);  // R2 >= 4s exactly
            CHECK(!rep.l0_caveat);
        }
    }
    CHECK(saw_lambda40);
}

TEST_CASE("witness: truncated rational alpha (1/3) still lands in the zero case") {
    ConstructionState st = build_levels(full_ap(), 2, GrowthMode::strict, 8);
    FixedPointAlpha third = alpha_rational(Int(1), Int(3), 128);
    auto hits = find_hits(st, third);
    bool saw42 = false;
    for (const auto& h : hits) {
        if (h.lambda == 42) {  // divisible by 3: ||42 alpha|| ~ 2^-128 scale
            saw42 = true;
            WitnessReport rep = witness_non_poissonian(st, third, h);
            CHECK(rep.rho_zero_case);
            CHECK(rep.rho > 0);  // truncation leaves a tiny exact residue
            CHECK(rep.inequality_holds);
        }
    }
    CHECK(saw42);
}

TEST_CASE("witness: rho > 0 case reports the deviation bound") {
    ConstructionState st = build_levels(full_ap(), 3, GrowthMode::strict, 8);
    // hunt for a hit with rho >= c2/(4K^2) among seeded alphas
    bool found = false;
    for (u64 i = 0; i < 200 && !found; ++i) {
        FixedPointAlpha a = alpha_random(128, derive_seed(123, i));
        for (const auto& h : find_hits(st, a)) {
            WitnessReport rep = witness_non_poissonian(st, a, h);
            if (!rep.rho_zero_case) {
                found = true;
                CHECK(rep.eps > 0);
                CHECK(rep.s1 >= 0);
                CHECK(rep.s2 > rep.s1);
                CHECK(rep.dev_bound == st.c2 / (8 * st.K));
                // the selected multiplicity guarantees this at any level
                CHECK(rep.window_gain >= 2 * st.c2 / st.K);
                CHECK(rep.inequality_holds);
                break;
            }
        }
    }
    CHECK(found);
}
