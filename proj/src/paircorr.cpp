#include "pcorr/paircorr.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <omp.h>

namespace pcorr {

// ---------------------------------------------------------------------------
// Run-length grouping of a sorted point set. Duplicate points are frequent
// for rational alpha, so all window counting works on (value, count) groups.
// ---------------------------------------------------------------------------
namespace {

struct Groups {
    std::vector<const Int*> val;  // distinct values, ascending (borrowed)
    std::vector<u64> cnt;
    std::vector<u64> pref;        // pref[g] = count of points before group g
    u64 total = 0;

    explicit Groups(const TorusPointSet& ps) {
        u64 n = ps.size();
        total = n;
        for (u64 i = 0; i < n;) {
            u64 j = i + 1;
            while (j < n && ps.points[j] == ps.points[i]) ++j;
            val.push_back(&ps.points[i]);
            cnt.push_back(j - i);
            i = j;
        }
        pref.resize(val.size() + 1, 0);
        for (size_t g = 0; g < val.size(); ++g) pref[g + 1] = pref[g] + cnt[g];
    }

    u64 groups() const { return val.size(); }

    // prefix count over the doubled (wrapped) group array, h in [0, 2G]
    u64 pref2(u64 h) const {
        u64 G = groups();
        return h <= G ? pref[h] : total + pref[h - G];
    }

    // ordered pairs at distance zero: sum c*(c-1)
    u64 zero_pairs() const {
        u64 z = 0;
        for (u64 c : cnt) z += c * (c - 1);
        return z;
    }
};

// value of doubled index h is val[h mod G] (+ 2^B if h >= G);
// tests value(h) <= val[g] + T using bound = val[g]+T, bound_wrap = bound - 2^B.
inline bool in_window(const Groups& gr, u64 h, const Int& bound, const Int& bound_wrap) {
    u64 G = gr.groups();
    return h < G ? (*gr.val[h] <= bound) : (*gr.val[h - G] <= bound_wrap);
}

// Sum over groups g in [g_lo, g_hi) of cnt[g] * (#window(g) - 1), where
// window(g) = points in the circular interval [v_g, v_g + T]. The end
// pointer e only advances, so one pass is O(G + advancement).
u64 window_sum_range(const Groups& gr, const Int& T, const Int& two_B,
                     u64 g_lo, u64 g_hi) {
    u64 G = gr.groups();
    u64 sum = 0;
    u64 e = g_lo;
    for (u64 g = g_lo; g < g_hi; ++g) {
        if (e < g) e = g;
        Int bound = *gr.val[g] + T;
        Int bound_wrap = bound - two_B;
        while (e + 1 < g + G && in_window(gr, e + 1, bound, bound_wrap)) ++e;
        u64 w = gr.pref2(e + 1) - gr.pref2(g);
        sum += gr.cnt[g] * (w - 1);
    }
    return sum;
}

// #{ordered (j,k), j != k : torus distance <= T}, T >= 0 clamped by caller
// to < 2^(B-1); the identity is
//   ordered = 2 * S - Z
// with S the one-sided clockwise window sum and Z the zero-distance pairs
// (each unordered pair appears once in S via its short arc, zero-distance
// pairs appear twice).
u64 ordered_within_serial(const Groups& gr, const Int& T, u32 bits) {
    Int two_B = pow2(bits);
    u64 S = window_sum_range(gr, T, two_B, 0, gr.groups());
    return 2 * S - gr.zero_pairs();
}

u64 ordered_within_parallel(const Groups& gr, const Int& T, u32 bits) {
    Int two_B = pow2(bits);
    u64 G = gr.groups();
    int nt = omp_get_max_threads();
    if (nt <= 1 || G < 4096) return ordered_within_serial(gr, T, bits);
    std::vector<u64> partial(nt, 0);
#pragma omp parallel num_threads(nt)
    {
        int t = omp_get_thread_num();
        u64 lo = G * static_cast<u64>(t) / nt;
        u64 hi = G * static_cast<u64>(t + 1) / nt;
        partial[t] = window_sum_range(gr, T, two_B, lo, hi);
    }
    u64 S = 0;
    for (u64 p : partial) S += p;  // fixed order, deterministic
    return 2 * S - gr.zero_pairs();
}

// threshold in raw units: d <= s*2^B/N  <=>  d <= floor(s*2^B/N)
Int raw_threshold(const Rat& s, u32 bits, u64 n) {
    Rat t = s * Rat(pow2(bits), Int(static_cast<unsigned long>(n)));
    return floor_rat(t);
}

void check_r2_pre(const TorusPointSet& points, const Rat& s) {
    if (points.size() == 0) throw std::invalid_argument("r2: empty point set");
    if (s < 0) throw std::invalid_argument("r2: s must be >= 0");
}

}  // namespace

Rat r2_naive(const TorusPointSet& points, const Rat& s) {
    check_r2_pre(points, s);
    u64 n = points.size();
    Int two_B = pow2(points.bits);
    // rhs = s_num * 2^B, lhs per pair = N * d * s_den
    Int rhs = s.get_num() * two_B;
    Int n_sden = Int(static_cast<unsigned long>(n)) * s.get_den();
    u64 count = 0;
    Int d, wrap;
    for (u64 i = 0; i < n; ++i) {
        for (u64 j = i + 1; j < n; ++j) {
            d = points.points[j] - points.points[i];  // sorted: j >= i
            wrap = two_B - d;
            if (wrap < d) d = wrap;
            if (d * n_sden <= rhs) count += 2;  // both orders
        }
    }
    return make_rat(Int(count), Int(static_cast<unsigned long>(n)));
}

static Rat r2_windowed(const TorusPointSet& points, const Rat& s, bool parallel) {
    check_r2_pre(points, s);
    u64 n = points.size();
    if (n == 1) return Rat(0);
    Int T = raw_threshold(s, points.bits, n);
    Int half = pow2(points.bits - 1);
    if (T >= half)  // saturation: every distance is <= 2^(B-1)
        return make_rat(Int(n) * Int(n - 1), Int(static_cast<unsigned long>(n)));
    Groups gr(points);
    u64 count = parallel ? ordered_within_parallel(gr, T, points.bits)
                         : ordered_within_serial(gr, T, points.bits);
    return make_rat(Int(count), Int(static_cast<unsigned long>(n)));
}

Rat r2_fast(const TorusPointSet& points, const Rat& s) { return r2_windowed(points, s, true); }
Rat r2_fast_serial(const TorusPointSet& points, const Rat& s) { return r2_windowed(points, s, false); }

static PairCorrelationCurve curve_impl(const TorusPointSet& points,
                                       const std::vector<Rat>& s_grid, bool parallel) {
    if (points.size() == 0) throw std::invalid_argument("r2_curve: empty point set");
    for (size_t i = 0; i < s_grid.size(); ++i) {
        if (s_grid[i] < 0) throw std::invalid_argument("r2_curve: s values must be >= 0");
        if (i > 0 && !(s_grid[i - 1] < s_grid[i]))
            throw std::invalid_argument("r2_curve: s_grid must be strictly ascending");
    }
    u64 n = points.size();
    u64 m = s_grid.size();
    PairCorrelationCurve curve;
    curve.s_grid = s_grid;
    curve.r2_values.resize(m);
    curve.n = n;
    if (m == 0) return curve;

    Groups gr(points);
    Int two_B = pow2(points.bits);
    Int half = pow2(points.bits - 1);
    u64 G = gr.groups();
    u64 Z = gr.zero_pairs();
    u64 sat = n * (n - 1);

    auto run_chunk = [&](size_t k_lo, size_t k_hi) {
        // incremental window: per-group end pointers persist across the
        // ascending thresholds of this chunk
        std::vector<u64> e(G);
        for (u64 g = 0; g < G; ++g) e[g] = g;
        for (size_t k = k_lo; k < k_hi; ++k) {
            Int T = raw_threshold(s_grid[k], points.bits, n);
            if (T >= half) {
                curve.r2_values[k] = make_rat(Int(sat), Int(static_cast<unsigned long>(n)));
                continue;
            }
            u64 S = 0;
            for (u64 g = 0; g < G; ++g) {
                Int bound = *gr.val[g] + T;
                Int bound_wrap = bound - two_B;
                u64 ee = e[g];
                while (ee + 1 < g + G && in_window(gr, ee + 1, bound, bound_wrap)) ++ee;
                e[g] = ee;
                S += gr.cnt[g] * (gr.pref2(ee + 1) - gr.pref2(g) - 1);
            }
            curve.r2_values[k] = make_rat(Int(2 * S - Z), Int(static_cast<unsigned long>(n)));
        }
    };

    int nt = parallel ? omp_get_max_threads() : 1;
    if (nt <= 1 || m < 2) {
        run_chunk(0, m);
    } else {
#pragma omp parallel num_threads(nt)
        {
            int t = omp_get_thread_num();
            size_t lo = m * static_cast<size_t>(t) / nt;
            size_t hi = m * static_cast<size_t>(t + 1) / nt;
            run_chunk(lo, hi);
        }
    }

    // type invariants: non-decreasing in s, bounded by n - 1
    Rat bound_max(Int(n - 1));
    for (size_t k = 0; k < m; ++k) {
        if (k > 0 && curve.r2_values[k] < curve.r2_values[k - 1])
            throw std::logic_error("r2_curve: values not non-decreasing");
        if (curve.r2_values[k] > bound_max)
            throw std::logic_error("r2_curve: value exceeds n - 1");
    }
    return curve;
}

PairCorrelationCurve r2_curve(const TorusPointSet& points, const std::vector<Rat>& s_grid) {
    return curve_impl(points, s_grid, true);
}
PairCorrelationCurve r2_curve_serial(const TorusPointSet& points, const std::vector<Rat>& s_grid) {
    return curve_impl(points, s_grid, false);
}

Rat poissonian_deviation_exact(const PairCorrelationCurve& curve) {
    Rat dev(0);
    for (size_t k = 0; k < curve.s_grid.size(); ++k) {
        Rat d = curve.r2_values[k] - 2 * curve.s_grid[k];
        if (d < 0) d = -d;
        if (d > dev) dev = d;
    }
    return dev;
}

double poissonian_deviation(const PairCorrelationCurve& curve) {
    return poissonian_deviation_exact(curve).get_d();
}

SpacingStats gap_structure(const TorusPointSet& points) {
    u64 n = points.size();
    if (n < 2) throw std::invalid_argument("gap_structure: need n >= 2");
    Int two_B = pow2(points.bits);

    std::vector<Int> gaps;
    gaps.reserve(n);
    Int sum = 0;
    for (u64 i = 0; i + 1 < n; ++i) gaps.push_back(points.points[i + 1] - points.points[i]);
    gaps.push_back(two_B - points.points[n - 1] + points.points[0]);  // wraparound gap
    for (const Int& g : gaps) sum += g;
    if (sum != two_B) throw std::logic_error("gap_structure: gaps do not sum to full circle");

    SpacingStats st;
    st.n = n;
    std::vector<Int> sorted_gaps = gaps;
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    st.distinct_gap_count = 1;
    for (u64 i = 1; i < n; ++i)
        if (sorted_gaps[i] != sorted_gaps[i - 1]) ++st.distinct_gap_count;

    st.normalized_gaps.reserve(n);
    for (const Int& g : sorted_gaps)
        st.normalized_gaps.push_back(make_rat(g * Int(static_cast<unsigned long>(n)), two_B));

    // Kolmogorov-Smirnov distance to the unit exponential CDF
    double D = 0.0;
    for (u64 i = 0; i < n; ++i) {
        double x = st.normalized_gaps[i].get_d();
        double F = 1.0 - std::exp(-x);
        double lo = F - static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n - F;
        D = std::max(D, std::max(lo, hi));
    }
    st.ks_to_exponential = D;
    return st;
}

std::vector<Rat> make_s_grid(const Rat& start, const Rat& stop, const Rat& step) {
    if (step <= 0) throw std::invalid_argument("make_s_grid: step must be > 0");
    if (start < 0) throw std::invalid_argument("make_s_grid: start must be >= 0");
    std::vector<Rat> grid;
    for (Rat s = start; s <= stop; s += step) grid.push_back(s);
    return grid;
}

}  // namespace pcorr
