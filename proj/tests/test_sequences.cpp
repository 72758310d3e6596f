#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcorr/rng.hpp"
#include "pcorr/sequences.hpp"

#include <set>

using namespace pcorr;

TEST_CASE("polynomial generator evaluates exactly") {
    // a(x) = x^2
    IntSeq s = gen_polynomial({Int(0), Int(0), Int(1)}, 4);
    REQUIRE(s.values.size() == 4);
    CHECK(s.values[0] == 1);
    CHECK(s.values[1] == 4);
    CHECK(s.values[2] == 9);
    CHECK(s.values[3] == 16);

    // identity polynomial
    IntSeq id = gen_polynomial({Int(0), Int(1)}, 3);
    CHECK(id.values == std::vector<Int>{1, 2, 3});
}

TEST_CASE("polynomial generator rejects non-monotone evaluation") {
    // a(x) = x^2 - 10x is not increasing (or positive) on 1..4
    CHECK_THROWS_AS(gen_polynomial({Int(0), Int(-10), Int(1)}, 4), std::invalid_argument);
    // leading coefficient must be positive
    CHECK_THROWS_AS(gen_polynomial({Int(1), Int(-1)}, 3), std::invalid_argument);
}

TEST_CASE("lacunary generator") {
    IntSeq s = gen_lacunary(Int(2), 4);
    CHECK(s.values == std::vector<Int>{2, 4, 8, 16});
    IntSeq t = gen_lacunary(Int(3), 3);
    CHECK(t.values == std::vector<Int>{3, 9, 27});
    CHECK_THROWS_AS(gen_lacunary(Int(1), 3), std::invalid_argument);

    IntSeq big = gen_lacunary(Int(2), 2000);
    CHECK(bit_length(big.values.back()) == 2001);
}

TEST_CASE("sidon greedy: frozen prefix from the brute-force oracle") {
    // oracle: smallest next element keeping all pairwise differences distinct,
    // re-derived here by direct recomputation with a difference set
    std::vector<u64> oracle;
    std::set<u64> diffs;
    u64 cand = 1;
    while (oracle.size() < 10) {
        bool ok = true;
        for (u64 x : oracle)
            if (diffs.count(cand - x)) { ok = false; break; }
        if (ok) {
            for (u64 x : oracle) diffs.insert(cand - x);
            oracle.push_back(cand);
        }
        ++cand;
    }
    REQUIRE(oracle == std::vector<u64>{1, 2, 4, 8, 13, 21, 31, 45, 66, 81});

    IntSeq s = gen_sidon_greedy(10);
    for (size_t i = 0; i < 10; ++i) CHECK(s.values[i] == Int(static_cast<unsigned long>(oracle[i])));

    IntSeq one = gen_sidon_greedy(1);
    CHECK(one.values == std::vector<Int>{1});
}

TEST_CASE("sidon greedy: all pairwise differences distinct (O(N^2) recheck)") {
    IntSeq s = gen_sidon_greedy(120);
    std::set<Int> seen;
    u64 total = 0;
    for (size_t i = 0; i < s.values.size(); ++i)
        for (size_t j = i + 1; j < s.values.size(); ++j) {
            seen.insert(s.values[j] - s.values[i]);
            ++total;
        }
    CHECK(seen.size() == total);  // N(N-1)/2 distinct positive differences
    CHECK(total == 120 * 119 / 2);
}

TEST_CASE("quasi-arithmetic: full progression when C = K = 1") {
    IntSeq s = gen_quasi_arithmetic_deg1(Rat(1), Rat(1), Int(1), Int(1), 10, 50, 7);
    REQUIRE(s.values.size() == 50);
    for (u64 n = 0; n < 50; ++n) CHECK(s.values[n] == Int(static_cast<unsigned long>(n + 1)));
}

TEST_CASE("quasi-arithmetic: membership guarantee recounted independently") {
    // C = 1/2, K = 1, step 2: first 10 values contain >= 5 members of {1, 3, ..., 19}
    IntSeq s = gen_quasi_arithmetic_deg1(make_rat(1, 2), Rat(1), Int(2), Int(1), 10, 30, 3);
    CHECK(qa_membership_count(s, 10) >= 5);
    s.check_invariants();

    // C = 0.9 at block 10^3 (desk-sized version of the N = 10^4 experiment)
    IntSeq t = gen_quasi_arithmetic_deg1(make_rat(9, 10), Rat(1), Int(1), Int(1), 1000, 10000, 7);
    CHECK(qa_membership_count(t, 1000) >= 900);
    t.check_invariants();
}

TEST_CASE("quasi-arithmetic: prefix stability under extension") {
    IntSeq a = gen_quasi_arithmetic_deg1(make_rat(3, 4), Rat(2), Int(3), Int(5), 64, 200, 42);
    IntSeq b = gen_quasi_arithmetic_deg1(make_rat(3, 4), Rat(2), Int(3), Int(5), 64, 500, 42);
    for (u64 i = 0; i < 200; ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("quasi-arithmetic: infeasible parameters rejected") {
    CHECK_THROWS_AS(gen_quasi_arithmetic_deg1(Rat(2), Rat(1), Int(1), Int(1), 10, 20, 1),
                    std::invalid_argument);  // C > 1
    CHECK_THROWS_AS(gen_quasi_arithmetic_deg1(Rat(1), make_rat(1, 2), Int(1), Int(1), 10, 20, 1),
                    std::invalid_argument);  // K < 1
    CHECK_THROWS_AS(gen_quasi_arithmetic_deg1(Rat(1), Rat(1), Int(1), Int(1), 30, 20, 1),
                    std::invalid_argument);  // block > N
}

TEST_CASE("every generator output satisfies the sequence invariants") {
    gen_polynomial({Int(3), Int(2), Int(1)}, 100).check_invariants();
    gen_lacunary(Int(5), 40).check_invariants();
    gen_sidon_greedy(64).check_invariants();
    gen_quasi_arithmetic_deg1(make_rat(1, 3), make_rat(3, 2), Int(4), Int(2), 30, 120, 9)
        .check_invariants();
}
