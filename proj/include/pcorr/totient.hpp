// Euler totient machinery: linear sieve, phi(n)/n subset averages, and the
// empirical tail density B(t) of n/phi(n).
#pragma once

#include "pcorr/num.hpp"

#include <functional>
#include <vector>

namespace pcorr {

// Euler-Mascheroni constant, 30 decimal digits (diagnostics only).
inline constexpr double kEulerGamma = 0.577215664901532860606512090082;

// phi(1..N) by linear sieve; table[0] unused, table[n] = phi(n).
std::vector<u32> totient_sieve(u64 N);

// (1/N) * sum over n <= N, n in A, of phi(n)/n as an exact rational.
// The exact sum's denominator grows like lcm(1..N); capped at N <= 2*10^5.
Rat totient_ratio_average(const std::function<bool(u64)>& in_A, u64 N,
                          const std::vector<u32>& phi);

// Double-precision variant for large N (error ~1e-12, diagnostics).
double totient_ratio_average_f64(const std::function<bool(u64)>& in_A, u64 N,
                                 const std::vector<u32>& phi);

// Fraction of n <= N with n/phi(n) >= t, t >= 1 rational; compared exactly
// via n * t_den >= t_num * phi(n). Returns (count, N) as an exact rational.
Rat empirical_B(const Rat& t, u64 N, const std::vector<u32>& phi);

// Asymptotic tail approximation exp(-e^(t * e^-gamma)).
double b_tail_approx(double t);

// t0(delta) = e^gamma * log(-2 * log(delta / 4)); requires delta < 4 e^(-1/2).
double t0_of_delta(double delta);

// c(delta) = delta / (3 * t0(delta)): the density-to-average constant.
double c_of_delta(double delta);

}  // namespace pcorr
