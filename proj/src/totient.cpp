#include "pcorr/totient.hpp"

#include <cmath>

namespace pcorr {

std::vector<u32> totient_sieve(u64 N) {
    if (N == 0) throw std::invalid_argument("totient_sieve: N must be >= 1");
    if (N > 100'000'000) throw std::invalid_argument("totient_sieve: N exceeds memory limit");
    std::vector<u32> phi(N + 1, 0);
    std::vector<u32> primes;
    phi[1] = 1;
    for (u64 n = 2; n <= N; ++n) {
        if (phi[n] == 0) {  // n prime
            phi[n] = static_cast<u32>(n - 1);
            primes.push_back(static_cast<u32>(n));
        }
        for (u32 p : primes) {
            if (p > N / n) break;
            if (n % p == 0) {
                phi[n * p] = phi[n] * p;
                break;
            }
            phi[n * p] = phi[n] * (p - 1);
        }
    }
    return phi;
}

Rat totient_ratio_average(const std::function<bool(u64)>& in_A, u64 N,
                          const std::vector<u32>& phi) {
    if (N == 0 || N >= phi.size())
        throw std::invalid_argument("totient_ratio_average: N out of sieve range");
    if (N > 200'000)
        throw std::invalid_argument("totient_ratio_average: exact sum capped at N <= 2*10^5; "
                                    "use totient_ratio_average_f64");
    // pairwise tree merge keeps intermediate denominators balanced
    std::vector<Rat> terms;
    terms.reserve(N);
    for (u64 n = 1; n <= N; ++n)
        if (in_A(n)) terms.push_back(make_rat(Int(static_cast<unsigned long>(phi[n])),
                                              Int(static_cast<unsigned long>(n))));
    if (terms.empty()) return Rat(0);
    while (terms.size() > 1) {
        std::vector<Rat> next;
        next.reserve((terms.size() + 1) / 2);
        for (size_t i = 0; i + 1 < terms.size(); i += 2) next.push_back(terms[i] + terms[i + 1]);
        if (terms.size() % 2) next.push_back(terms.back());
        terms = std::move(next);
    }
    return terms[0] / Rat(static_cast<unsigned long>(N));
}

double totient_ratio_average_f64(const std::function<bool(u64)>& in_A, u64 N,
                                 const std::vector<u32>& phi) {
    if (N == 0 || N >= phi.size())
        throw std::invalid_argument("totient_ratio_average_f64: N out of sieve range");
    double s = 0.0;
    for (u64 n = 1; n <= N; ++n)
        if (in_A(n)) s += static_cast<double>(phi[n]) / static_cast<double>(n);
    return s / static_cast<double>(N);
}

Rat empirical_B(const Rat& t, u64 N, const std::vector<u32>& phi) {
    if (t < 1) throw std::invalid_argument("empirical_B: t must be >= 1");
    if (N == 0 || N >= phi.size())
        throw std::invalid_argument("empirical_B: N out of sieve range");
    u64 tn = to_u64(t.get_num());
    u64 td = to_u64(t.get_den());
    u64 count = 0;
    for (u64 n = 1; n <= N; ++n) {
        // n/phi(n) >= t  <=>  n * t_den >= t_num * phi(n)
        if ((unsigned __int128)n * td >= (unsigned __int128)tn * phi[n]) ++count;
    }
    return make_rat(Int(static_cast<unsigned long>(count)), Int(static_cast<unsigned long>(N)));
}

double b_tail_approx(double t) { return std::exp(-std::exp(t * std::exp(-kEulerGamma))); }

double t0_of_delta(double delta) {
    if (!(delta > 0 && delta < 4 * std::exp(-0.5)))
        throw std::invalid_argument("t0_of_delta: need 0 < delta < 4 e^(-1/2)");
    return std::exp(kEulerGamma) * std::log(-2.0 * std::log(delta / 4.0));
}

double c_of_delta(double delta) { return delta / (3.0 * t0_of_delta(delta)); }

}  // namespace pcorr
