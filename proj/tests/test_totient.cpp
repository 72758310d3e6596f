#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcorr/totient.hpp"

using namespace pcorr;

namespace {

bool is_prime_trial(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("phi spot values") {
    auto phi = totient_sieve(100);
    CHECK(phi[1] == 1);
    CHECK(phi[2] == 1);
    CHECK(phi[6] == 2);
    CHECK(phi[10] == 4);
    CHECK(phi[12] == 4);
    CHECK(phi[97] == 96);
}

TEST_CASE("phi(p) = p - 1 for primes up to 10^4 (primality cross-check)") {
    auto phi = totient_sieve(10000);
    for (u64 n = 2; n <= 10000; ++n) {
        if (is_prime_trial(n)) REQUIRE(phi[n] == n - 1);
        else REQUIRE(phi[n] < n - 1);
    }
}

TEST_CASE("average of phi(n)/n approaches 6/pi^2") {
    auto phi = totient_sieve(1000000);
    double avg = totient_ratio_average_f64([](u64) { return true; }, 1000000, phi);
    CHECK(avg == doctest::Approx(0.6079271).epsilon(2e-5));

    // exact rational path agrees with the float path at a desk-scale N
    Rat exact = totient_ratio_average([](u64) { return true; }, 20000, phi);
    double f64 = totient_ratio_average_f64([](u64) { return true; }, 20000, phi);
    CHECK(exact.get_d() == doctest::Approx(f64).epsilon(1e-12));
}

TEST_CASE("subset averages: empty set, full set, density bound") {
    auto phi = totient_sieve(100000);
    CHECK(totient_ratio_average([](u64) { return false; }, 1000, phi) == 0);

    // A = odd numbers has density 1/2 > delta = 0.4; density-to-average bound
    // average >= delta / (3 t0(delta))
    double delta = 0.4;
    double bound = delta / (3.0 * t0_of_delta(delta));
    Rat avg = totient_ratio_average([](u64 n) { return n % 2 == 1; }, 100000, phi);
    CHECK(avg.get_d() >= bound);

    // and for a sparser set: multiples of 3 (density 1/3 > 0.3)
    double bound3 = 0.3 / (3.0 * t0_of_delta(0.3));
    Rat avg3 = totient_ratio_average([](u64 n) { return n % 3 == 0; }, 100000, phi);
    CHECK(avg3.get_d() >= bound3);

    CHECK_THROWS_AS(totient_ratio_average([](u64) { return true; }, 500000, phi),
                    std::invalid_argument);  // exact path capped
}

TEST_CASE("empirical B: B(1) = 1, non-increasing in t") {
    auto phi = totient_sieve(200000);
    u64 N = 200000;
    CHECK(empirical_B(Rat(1), N, phi) == 1);
    Rat prev = empirical_B(Rat(1), N, phi);
    for (auto t : {make_rat(3, 2), Rat(2), make_rat(5, 2), Rat(3), Rat(4)}) {
        Rat b = empirical_B(t, N, phi);
        CHECK(b <= prev);
        prev = b;
    }
    CHECK_THROWS_AS(empirical_B(make_rat(1, 2), N, phi), std::invalid_argument);
}

TEST_CASE("empirical B: exact threshold comparison (n q >= p phi(n))") {
    auto phi = totient_sieve(100);
    // n/phi(n) >= 2 holds exactly for the even numbers in 1..10 plus none odd
    Rat b = empirical_B(Rat(2), 10, phi);
    CHECK(b == make_rat(5, 10));
}

TEST_CASE("t0 and c(delta) formulas") {
    // t0 = e^gamma * log(-2 log(delta/4))
    double d = 0.0625;
    double t0 = t0_of_delta(d);
    CHECK(t0 == doctest::Approx(std::exp(kEulerGamma) * std::log(-2.0 * std::log(d / 4.0))));
    CHECK(c_of_delta(d) == doctest::Approx(d / (3.0 * t0)));
    CHECK_THROWS_AS(t0_of_delta(3.0), std::invalid_argument);
}
