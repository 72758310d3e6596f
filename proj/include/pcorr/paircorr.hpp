// Pair correlation statistic R2, Poissonian deviation, and circular
// nearest-neighbor gap statistics. All pair counting is bit-exact: the naive
// quadratic kernel is the reference semantics, the windowed kernel must
// agree with it exactly on every input.
#pragma once

#include "pcorr/torus.hpp"

#include <vector>

namespace pcorr {

struct PairCorrelationCurve {
    std::vector<Rat> s_grid;     // ascending, >= 0
    std::vector<Rat> r2_values;  // exact pair count / n, non-decreasing
    u64 n = 0;                   // point count used
};

struct SpacingStats {
    std::vector<Rat> normalized_gaps;  // sorted, gap * n / 2^B, exact
    double ks_to_exponential = 0.0;    // sup |ECDF - (1 - e^-x)|
    u64 distinct_gap_count = 0;        // distinct raw B-bit gap values
    u64 n = 0;
};

// (1/N) #{ordered pairs j != k : ||theta_j - theta_k|| <= s/N}, threshold
// tested pair-by-pair by exact cross-multiplication
//   N * min(d, 2^B - d) * s_den <= s_num * 2^B.
// Quadratic reference kernel; keep it dumb.
Rat r2_naive(const TorusPointSet& points, const Rat& s);

// Same value as r2_naive on every input, via a sliding window over the
// sorted circle: O(N log N + matches). Parallel over group chunks.
Rat r2_fast(const TorusPointSet& points, const Rat& s);

// Serial variant of the windowed kernel (reference for the parallel path).
Rat r2_fast_serial(const TorusPointSet& points, const Rat& s);

// One shared sort, window advanced incrementally across an ascending grid.
PairCorrelationCurve r2_curve(const TorusPointSet& points, const std::vector<Rat>& s_grid);
PairCorrelationCurve r2_curve_serial(const TorusPointSet& points, const std::vector<Rat>& s_grid);

// sup over the grid of |R2(s) - 2s|
double poissonian_deviation(const PairCorrelationCurve& curve);
Rat poissonian_deviation_exact(const PairCorrelationCurve& curve);

// Circular nearest-neighbor gaps of a sorted point set (n >= 2). Raw gaps
// sum to the full circle exactly; the KS distance to 1 - e^-x is the only
// floating-point quantity.
SpacingStats gap_structure(const TorusPointSet& points);

// Exact grid "start:stop:step" -> {start, start+step, ..., <= stop}
std::vector<Rat> make_s_grid(const Rat& start, const Rat& stop, const Rat& step);

}  // namespace pcorr
