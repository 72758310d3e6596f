// Additive energy E(A) = #{(a,b,c,d) in A^4 : a+b = c+d} of sequence
// truncations, exactly. Counting goes through positive-difference
// multiplicities: E = N^2 + 2 * sum_v A_N(v)^2.
#pragma once

#include "pcorr/sequences.hpp"

#include <utility>
#include <vector>

namespace pcorr {

struct DiffCounts {
    std::vector<std::pair<Int, u64>> counts;  // (difference v > 0, multiplicity), ascending v
    u64 n = 0;                                // truncation length

    // sum of multiplicities; equals n(n-1)/2 for strictly increasing input
    Int total() const;
};

struct EnergyRecord {
    u64 n;
    Int energy;          // exact E(A_n)
    Rat energy_over_n3;  // E / n^3
};

struct EnergyProfile {
    std::vector<EnergyRecord> records;  // ascending n
    double fitted_exponent = 0.0;       // least-squares slope of log E vs log n
    double fit_residual = 0.0;          // RMS residual of the fit
};

enum class EnergyClass { sub_cubic, near_cubic, inconclusive };
std::string energy_class_name(EnergyClass c);

// Exact multiplicities A_N(v) of all positive differences of the first N
// values. Desk-scale kernel: N <= 2*10^4; beyond the dense regime
// (span <= 2^26) the distinct-difference count is capped as documented.
DiffCounts diff_counts(const IntSeq& seq, u64 N);
DiffCounts diff_counts_serial(const IntSeq& seq, u64 N);

// E(A_N) via difference counts, with the trivial bounds N^2 <= E <= N^3
// asserted on every run. Picks a flat-array, sorted-run or convolution path
// internally; all paths are exact and agree.
Int energy_exact(const IntSeq& seq, u64 N);

// Direct quadruple enumeration of a+b = c+d (the oracle). N <= 50.
Int energy_brute(const IntSeq& seq, u64 N);

// Alternative exact route: squared sum-representation counts via integer
// convolution (NTT) over the value universe. Requires u64 values with
// span <= 2^26.
Int energy_convolution(const IntSeq& seq, u64 N);

// Exact energies over an ascending grid plus a log-log exponent fit
// (the fit itself is double precision; it is a diagnostic, not a count).
EnergyProfile energy_profile(const IntSeq& seq, const std::vector<u64>& N_grid);

// Growth dichotomy: sub_cubic if exponent <= 3 - eps0, near_cubic if
// E/N^3 stays above kappa on the whole grid, else inconclusive.
EnergyClass classify(const EnergyProfile& profile, double eps0 = 0.25, double kappa = 0.01);

}  // namespace pcorr
