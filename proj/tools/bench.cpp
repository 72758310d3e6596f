// Benchmark of the OpenMP kernels against their serial references. Every
// pair must produce bit-identical results; the table reports timings and
// the verified-equal flag. Workload sizes are desk-scale defaults,
// overridable as: pcorr_bench [n_points] [n_energy] [n_subset].
//
//   PCORR_THREADS or OMP_NUM_THREADS controls the parallel side.

#include "pcorr/construction.hpp"
#include "pcorr/energy.hpp"
#include "pcorr/paircorr.hpp"
#include "pcorr/sequences.hpp"
#include "pcorr/torus.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

using namespace pcorr;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Row {
    const char* name;
    double serial_ms;
    double parallel_ms;
    bool equal;
};

void print_row(const Row& r) {
    std::printf("  %-34s %10.1f %10.1f %8.2fx   %s\n", r.name, r.serial_ms, r.parallel_ms,
                r.serial_ms / r.parallel_ms, r.equal ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* tc = std::getenv("PCORR_THREADS")) {
        int n = std::atoi(tc);
        if (n > 0) omp_set_num_threads(n);
    }
    u64 n_points = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 100000;
    u64 n_energy = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 8000;
    u64 n_subset = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 20000;

    std::printf("threads: %d   points=%llu energy=%llu subset=%llu\n", omp_get_max_threads(),
                (unsigned long long)n_points, (unsigned long long)n_energy, (unsigned long long)n_subset);
    std::printf("  %-34s %10s %10s %9s\n", "kernel", "serial/ms", "omp/ms", "speedup");

    bool all_equal = true;

    {  // fractional parts: parallel product loop
        IntSeq seq = gen_polynomial({Int(0), Int(0), Int(1)}, n_points);
        FixedPointAlpha a = alpha_random(128, 7);
        double t0 = now_ms();
        TorusPointSet ser = fractional_parts_serial(seq, a);
        double t1 = now_ms();
        TorusPointSet par = fractional_parts(seq, a);
        double t2 = now_ms();
        Row r{"fractional_parts (a(n)=n^2)", t1 - t0, t2 - t1,
              ser.points == par.points && ser.perm == par.perm};
        print_row(r);
        all_equal &= r.equal;

        // r2 curve: windowed kernel over grid chunks
        auto grid = make_s_grid(Rat(0), Rat(3), make_rat(1, 10));
        t0 = now_ms();
        auto c_ser = r2_curve_serial(par, grid);
        t1 = now_ms();
        auto c_par = r2_curve(par, grid);
        t2 = now_ms();
        Row r2row{"r2_curve (31 thresholds)", t1 - t0, t2 - t1, c_ser.r2_values == c_par.r2_values};
        print_row(r2row);
        all_equal &= r2row.equal;
    }

    {  // energy difference counts: row-blocked flat counting
        IntSeq ap = gen_polynomial({Int(0), Int(3)}, n_energy);
        double t0 = now_ms();
        auto ser = diff_counts_serial(ap, n_energy);
        double t1 = now_ms();
        auto par = diff_counts(ap, n_energy);
        double t2 = now_ms();
        Row r{"diff_counts (arith. prog.)", t1 - t0, t2 - t1, ser.counts == par.counts};
        print_row(r);
        all_equal &= r.equal;
    }

    {  // construction difference multiset
        std::vector<u64> offsets;
        for (u64 i = 0; i < n_subset; ++i) offsets.push_back(i);
        double t0 = now_ms();
        auto ser = difference_multiset_serial(offsets, n_subset);
        double t1 = now_ms();
        auto par = difference_multiset(offsets, n_subset);
        double t2 = now_ms();
        Row r{"difference_multiset (full AP)", t1 - t0, t2 - t1, ser == par};
        print_row(r);
        all_equal &= r.equal;
    }

    if (!all_equal) {
        std::fprintf(stderr, "FAIL: a parallel kernel diverged from its serial reference\n");
        return 1;
    }
    return 0;
}
