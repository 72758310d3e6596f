#include "pcorr/energy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include <omp.h>

namespace pcorr {

namespace {

constexpr u64 kKernelCap = 20000;        // O(N^2) pair kernel cap
constexpr u64 kFlatSpanCap = u64(1) << 26;   // dense regime: flat arrays
constexpr u64 kSortPairsCapU64 = 50'000'000; // u64 sorted-diff path
constexpr u64 kSortPairsCapMpz = 2'500'000;  // big-value sorted-diff path
constexpr u64 kDistinctCap = u64(1) << 25;   // materialized DiffCounts entries

void check_kernel_pre(const IntSeq& seq, u64 N) {
    if (N == 0 || N > seq.size())
        throw std::invalid_argument("energy: truncation N out of range");
    if (N > kKernelCap)
        throw std::invalid_argument("energy: N = " + std::to_string(N) +
                                    " exceeds O(N^2) kernel limit " + std::to_string(kKernelCap));
}

bool values_fit_u64(const IntSeq& seq, u64 N) { return fits_u64(seq.values[N - 1]); }

// span = max - min; the difference/sum universe size
Int value_span(const IntSeq& seq, u64 N) { return seq.values[N - 1] - seq.values[0]; }

// --- flat path: counts indexed by difference value, span <= 2^26 ------------

std::vector<u32> flat_counts_serial(const std::vector<u64>& v) {
    u64 n = v.size();
    u64 span = v[n - 1] - v[0];
    std::vector<u32> counts(span + 1, 0);
    for (u64 i = 0; i < n; ++i)
        for (u64 j = i + 1; j < n; ++j) ++counts[v[j] - v[i]];
    return counts;
}

std::vector<u32> flat_counts_parallel(const std::vector<u64>& v) {
    u64 n = v.size();
    u64 span = v[n - 1] - v[0];
    std::vector<std::atomic<u32>> counts(span + 1);
    for (auto& c : counts) c.store(0, std::memory_order_relaxed);
#pragma omp parallel for schedule(dynamic, 64)
    for (i64 i = 0; i < static_cast<i64>(n); ++i)
        for (u64 j = i + 1; j < n; ++j)
            counts[v[j] - v[i]].fetch_add(1, std::memory_order_relaxed);
    std::vector<u32> out(span + 1);
    for (u64 k = 0; k <= span; ++k) out[k] = counts[k].load(std::memory_order_relaxed);
    return out;
}

std::vector<u64> to_u64_values(const IntSeq& seq, u64 N) {
    std::vector<u64> v(N);
    for (u64 i = 0; i < N; ++i) v[i] = to_u64(seq.values[i]);
    return v;
}

// --- sorted-run path: materialize all differences, sort, run-length ---------

template <typename T>
std::vector<std::pair<T, u64>> runs_of_sorted(std::vector<T>& diffs) {
    std::sort(diffs.begin(), diffs.end());
    std::vector<std::pair<T, u64>> runs;
    for (u64 i = 0; i < diffs.size();) {
        u64 j = i + 1;
        while (j < diffs.size() && diffs[j] == diffs[i]) ++j;
        runs.emplace_back(std::move(diffs[i]), j - i);
        i = j;
    }
    return runs;
}

DiffCounts diff_counts_impl(const IntSeq& seq, u64 N, bool parallel) {
    check_kernel_pre(seq, N);
    DiffCounts dc;
    dc.n = N;
    if (N == 1) return dc;

    if (values_fit_u64(seq, N) && value_span(seq, N) <= Int(static_cast<unsigned long>(kFlatSpanCap))) {
        std::vector<u64> v = to_u64_values(seq, N);
        // differences of shifted values are the differences themselves;
        // the atomic path only pays off with real threads
        bool use_omp = parallel && omp_get_max_threads() > 1;
        std::vector<u32> counts = use_omp ? flat_counts_parallel(v) : flat_counts_serial(v);
        // flat index d corresponds to actual difference d (values share min shift)
        DiffCounts out;
        out.n = N;
        u64 distinct = 0;
        for (u64 d = 1; d < counts.size(); ++d)
            if (counts[d]) ++distinct;
        if (distinct > kDistinctCap)
            throw std::invalid_argument("diff_counts: distinct differences exceed materialization limit");
        out.counts.reserve(distinct);
        for (u64 d = 1; d < counts.size(); ++d)
            if (counts[d]) out.counts.emplace_back(Int(static_cast<unsigned long>(d)), counts[d]);
        return out;
    }

    u64 pairs = N * (N - 1) / 2;
    if (values_fit_u64(seq, N)) {
        if (pairs > kSortPairsCapU64)
            throw std::invalid_argument("diff_counts: pair count exceeds sorted-path limit");
        std::vector<u64> v = to_u64_values(seq, N);
        std::vector<u64> diffs(pairs);
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
        for (i64 i = 0; i < static_cast<i64>(N); ++i) {
            u64 off = static_cast<u64>(i) * N - static_cast<u64>(i) * (i + 1) / 2;
            for (u64 j = i + 1; j < N; ++j) diffs[off + (j - i - 1)] = v[j] - v[i];
        }
        auto runs = runs_of_sorted(diffs);
        if (runs.size() > kDistinctCap)
            throw std::invalid_argument("diff_counts: distinct differences exceed materialization limit");
        dc.counts.reserve(runs.size());
        for (auto& [d, c] : runs) dc.counts.emplace_back(Int(static_cast<unsigned long>(d)), c);
        return dc;
    }

    if (pairs > kSortPairsCapMpz)
        throw std::invalid_argument("diff_counts: pair count exceeds big-value path limit");
    std::vector<Int> diffs;
    diffs.reserve(pairs);
    for (u64 i = 0; i < N; ++i)
        for (u64 j = i + 1; j < N; ++j) diffs.push_back(seq.values[j] - seq.values[i]);
    auto runs = runs_of_sorted(diffs);
    dc.counts.reserve(runs.size());
    for (auto& [d, c] : runs) dc.counts.emplace_back(std::move(d), c);
    return dc;
}

// sum of squared multiplicities without materializing the count map
u64 sum_sq_flat(const std::vector<u32>& counts) {
    u64 s = 0;
    for (u64 d = 1; d < counts.size(); ++d) s += static_cast<u64>(counts[d]) * counts[d];
    return s;
}

// --- NTT convolution path ----------------------------------------------------
// p = 15 * 2^27 + 1 (Proth prime), primitive root 31: transforms up to 2^27.

constexpr u64 kNttPrime = 2013265921;
constexpr u64 kNttRoot = 31;

u64 pow_mod(u64 b, u64 e, u64 m) {
    u64 r = 1;
    b %= m;
    while (e) {
        if (e & 1) r = (unsigned __int128)r * b % m;
        b = (unsigned __int128)b * b % m;
        e >>= 1;
    }
    return r;
}

void ntt(std::vector<u64>& a, bool invert) {
    size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        u64 w = pow_mod(kNttRoot, (kNttPrime - 1) / len, kNttPrime);
        if (invert) w = pow_mod(w, kNttPrime - 2, kNttPrime);
        for (size_t i = 0; i < n; i += len) {
            u64 wn = 1;
            for (size_t k = 0; k < len / 2; ++k) {
                u64 u = a[i + k];
                u64 v = (unsigned __int128)a[i + k + len / 2] * wn % kNttPrime;
                a[i + k] = u + v < kNttPrime ? u + v : u + v - kNttPrime;
                a[i + k + len / 2] = u >= v ? u - v : u + kNttPrime - v;
                wn = (unsigned __int128)wn * w % kNttPrime;
            }
        }
    }
    if (invert) {
        u64 n_inv = pow_mod(n, kNttPrime - 2, kNttPrime);
        for (u64& x : a) x = (unsigned __int128)x * n_inv % kNttPrime;
    }
}

}  // namespace

Int DiffCounts::total() const {
    Int t = 0;
    for (const auto& [v, c] : counts) t += Int(static_cast<unsigned long>(c));
    return t;
}

DiffCounts diff_counts(const IntSeq& seq, u64 N) { return diff_counts_impl(seq, N, true); }
DiffCounts diff_counts_serial(const IntSeq& seq, u64 N) { return diff_counts_impl(seq, N, false); }

std::string energy_class_name(EnergyClass c) {
    switch (c) {
        case EnergyClass::sub_cubic: return "sub_cubic";
        case EnergyClass::near_cubic: return "near_cubic";
        case EnergyClass::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

static void check_trivial_bounds(const Int& E, u64 N) {
    Int n(static_cast<unsigned long>(N));
    if (E < n * n || E > n * n * n)
        throw std::logic_error("energy: trivial bounds N^2 <= E <= N^3 violated (E = " + dec(E) + ")");
}

Int energy_convolution(const IntSeq& seq, u64 N) {
    check_kernel_pre(seq, N);
    if (!values_fit_u64(seq, N))
        throw std::invalid_argument("energy_convolution: values exceed 64 bits");
    Int span_i = value_span(seq, N);
    if (span_i > Int(static_cast<unsigned long>(kFlatSpanCap)))
        throw std::invalid_argument("energy_convolution: span exceeds 2^26");
    u64 span = to_u64(span_i);
    u64 minv = to_u64(seq.values[0]);
    size_t len = 1;
    while (len < 2 * (span + 1)) len <<= 1;
    std::vector<u64> f(len, 0);
    for (u64 i = 0; i < N; ++i) f[to_u64(seq.values[i]) - minv] = 1;
    ntt(f, false);
    for (u64& x : f) x = (unsigned __int128)x * x % kNttPrime;
    ntt(f, true);
    // f[s] is now the ordered sum-representation count r(s); r <= N < p, exact
    u64 acc = 0;
    for (u64 x : f) acc += x * x;
    Int E(static_cast<unsigned long>(acc));
    check_trivial_bounds(E, N);
    return E;
}

Int energy_exact(const IntSeq& seq, u64 N) {
    check_kernel_pre(seq, N);
    Int n(static_cast<unsigned long>(N));
    if (N == 1) return Int(1);

    Int E;
    if (values_fit_u64(seq, N) && value_span(seq, N) <= Int(static_cast<unsigned long>(kFlatSpanCap))) {
        u64 span = to_u64(value_span(seq, N));
        // convolution beats the quadratic fill once pairs outgrow U log U
        double pairs = 0.5 * N * (N - 1);
        double conv_cost = 2.5 * (2.0 * span + 2) * std::log2(2.0 * span + 2);
        if (span >= 2 && pairs > conv_cost) return energy_convolution(seq, N);
        std::vector<u64> v = to_u64_values(seq, N);
        std::vector<u32> counts =
            omp_get_max_threads() > 1 ? flat_counts_parallel(v) : flat_counts_serial(v);
        E = n * n + 2 * Int(static_cast<unsigned long>(sum_sq_flat(counts)));
    } else {
        DiffCounts dc = diff_counts(seq, N);
        Int ssq = 0;
        for (const auto& [v, c] : dc.counts) ssq += Int(static_cast<unsigned long>(c * c));
        E = n * n + 2 * ssq;
    }
    check_trivial_bounds(E, N);
    return E;
}

Int energy_brute(const IntSeq& seq, u64 N) {
    if (N == 0 || N > seq.size())
        throw std::invalid_argument("energy_brute: truncation N out of range");
    if (N > 50) throw std::invalid_argument("energy_brute: oracle limited to N <= 50");
    // cache pair sums once; the count is still full quadruple enumeration
    std::vector<std::vector<Int>> sum(N, std::vector<Int>(N));
    for (u64 i = 0; i < N; ++i)
        for (u64 j = 0; j < N; ++j) sum[i][j] = seq.values[i] + seq.values[j];
    u64 count = 0;
    for (u64 a = 0; a < N; ++a)
        for (u64 b = 0; b < N; ++b)
            for (u64 c = 0; c < N; ++c)
                for (u64 d = 0; d < N; ++d)
                    if (sum[a][b] == sum[c][d]) ++count;
    return Int(static_cast<unsigned long>(count));
}

EnergyProfile energy_profile(const IntSeq& seq, const std::vector<u64>& N_grid) {
    if (N_grid.size() < 3)
        throw std::invalid_argument("energy_profile: need at least 3 grid points");
    for (size_t i = 1; i < N_grid.size(); ++i)
        if (N_grid[i] <= N_grid[i - 1])
            throw std::invalid_argument("energy_profile: grid must be strictly ascending");

    EnergyProfile prof;
    prof.records.reserve(N_grid.size());
    for (u64 N : N_grid) {
        EnergyRecord rec;
        rec.n = N;
        rec.energy = energy_exact(seq, N);
        Int n3 = Int(static_cast<unsigned long>(N));
        n3 = n3 * n3 * n3;
        rec.energy_over_n3 = make_rat(rec.energy, n3);
        prof.records.push_back(std::move(rec));
    }

    // least squares for log E = a * log N + b
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t m = prof.records.size();
    std::vector<double> xs(m), ys(m);
    for (size_t i = 0; i < m; ++i) {
        xs[i] = std::log(static_cast<double>(prof.records[i].n));
        // log of a big integer via mpz log2
        long exp2;
        double mant = mpz_get_d_2exp(&exp2, prof.records[i].energy.get_mpz_t());
        ys[i] = std::log(mant) + exp2 * std::log(2.0);
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = m * sxx - sx * sx;
    prof.fitted_exponent = (m * sxy - sx * sy) / denom;
    double intercept = (sy - prof.fitted_exponent * sx) / m;
    double ss = 0;
    for (size_t i = 0; i < m; ++i) {
        double r = ys[i] - (prof.fitted_exponent * xs[i] + intercept);
        ss += r * r;
    }
    prof.fit_residual = std::sqrt(ss / m);
    return prof;
}

EnergyClass classify(const EnergyProfile& profile, double eps0, double kappa) {
    if (profile.records.empty()) return EnergyClass::inconclusive;
    if (profile.fitted_exponent <= 3.0 - eps0) return EnergyClass::sub_cubic;
    bool bounded_below = true;
    for (const auto& rec : profile.records)
        if (rec.energy_over_n3.get_d() < kappa) { bounded_below = false; break; }
    if (bounded_below) return EnergyClass::near_cubic;
    return EnergyClass::inconclusive;
}

}  // namespace pcorr
