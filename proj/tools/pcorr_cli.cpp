// pcorr: pair-correlation statistics of {a(n) alpha} with exact arithmetic.
//
// Subcommands: gen, alpha, points, r2, spacings, energy, construct, star,
// hits, witness, sweep. Every randomized command takes an explicit --seed;
// identical invocations produce byte-identical outputs for exact columns.
// PCORR_THREADS overrides the OpenMP worker count.

#include "pcorr/construction.hpp"
#include "pcorr/energy.hpp"
#include "pcorr/io.hpp"
#include "pcorr/paircorr.hpp"
#include "pcorr/rng.hpp"
#include "pcorr/sequences.hpp"
#include "pcorr/torus.hpp"
#include "pcorr/totient.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <iostream>

using namespace pcorr;

namespace {

void emit_error(const std::string& code, const std::string& message) {
    Json err;
    err["schema_version"] = kSchemaVersion;
    err["error"]["code"] = code;
    err["error"]["message"] = message;
    std::cerr << err.dump() << "\n";
}

FixedPointAlpha alpha_from_flags(const std::string& alpha_json, u64 alpha_seed, u32 bits,
                                 bool have_seed) {
    if (!alpha_json.empty()) return alpha_from_json(read_json(alpha_json));
    if (have_seed) return alpha_random(bits, alpha_seed);
    throw CLI::ValidationError("alpha", "need --alpha-json or --alpha-seed");
}

struct SweepResult {
    u64 index;
    u64 seed;
    double deviation;
};

}  // namespace

int main(int argc, char** argv) {
    if (const char* tc = std::getenv("PCORR_THREADS")) {
        int n = std::atoi(tc);
        if (n > 0) omp_set_num_threads(n);
    }

    CLI::App app{"pair correlations, additive energy and quasi-arithmetic construction"};
    app.require_subcommand(1);

    // ---- gen -----------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate an integer sequence");
    std::string g_family, g_coeffs = "0,1", g_out;
    std::string g_C = "1", g_K = "1", g_step = "1", g_base_qa = "1";
    u64 g_n = 0, g_block = 0, g_seed = 0;
    std::string g_base = "2";
    bool g_have_seed = false;
    gen->add_option("--family", g_family, "poly|lacunary|qa1|sidon")->required();
    gen->add_option("--coeffs", g_coeffs, "polynomial coefficients c0,c1,... (ascending degree)");
    gen->add_option("--base", g_base, "lacunary base (>= 2)");
    gen->add_option("--C", g_C, "qa1 density in (0,1]");
    gen->add_option("--K", g_K, "qa1 span factor >= 1");
    gen->add_option("--step", g_step, "qa1 progression step");
    gen->add_option("--qa-base", g_base_qa, "qa1 progression offset");
    gen->add_option("--block", g_block, "qa1 block size M (default n)");
    gen->add_option("--seed", g_seed, "seed for qa1 tail")->each([&](const std::string&) { g_have_seed = true; });
    gen->add_option("--n", g_n, "sequence length")->required();
    gen->add_option("--out", g_out, "output JSON path")->required();

    // ---- alpha ---------------------------------------------------------
    auto* alpha = app.add_subcommand("alpha", "construct a fixed-point alpha");
    bool a_random = false, a_golden = false;
    std::string a_sqrt, a_ratio, a_out;
    u32 a_bits = 128;
    u64 a_seed = 0;
    bool a_have_seed = false;
    alpha->add_flag("--random", a_random, "uniform alpha from --seed");
    alpha->add_option("--sqrt", a_sqrt, "frac(sqrt(D)) for non-square D");
    alpha->add_flag("--golden", a_golden, "(sqrt(5)-1)/2");
    alpha->add_option("--rational", a_ratio, "p/q truncated to B bits");
    alpha->add_option("--bits", a_bits, "fixed-point resolution B")->required();
    alpha->add_option("--seed", a_seed)->each([&](const std::string&) { a_have_seed = true; });
    alpha->add_option("--out", a_out)->required();

    // ---- points --------------------------------------------------------
    auto* points = app.add_subcommand("points", "exact fractional parts {a(n) alpha}");
    std::string p_seq, p_alpha, p_out;
    u64 p_n = 0;
    points->add_option("--seq", p_seq)->required();
    points->add_option("--alpha", p_alpha)->required();
    points->add_option("--n", p_n, "use only the first n values");
    points->add_option("--out", p_out, "binary point-set path")->required();

    // ---- r2 ------------------------------------------------------------
    auto* r2 = app.add_subcommand("r2", "pair correlation curve");
    std::string r_points, r_grid = "0:5:0.1", r_out;
    bool r_naive = false;
    r2->add_option("--points", r_points)->required();
    r2->add_option("--s-grid", r_grid, "start:stop:step or comma list, exact rationals");
    r2->add_flag("--naive", r_naive, "use the quadratic reference kernel");
    r2->add_option("--out", r_out, "CSV path")->required();

    // ---- spacings ------------------------------------------------------
    auto* spacings = app.add_subcommand("spacings", "nearest-neighbor gap statistics");
    std::string sp_points, sp_out;
    spacings->add_option("--points", sp_points)->required();
    spacings->add_option("--out", sp_out)->required();

    // ---- energy --------------------------------------------------------
    auto* energy = app.add_subcommand("energy", "additive energy profile");
    std::string e_seq, e_grid, e_out;
    double e_eps0 = 0.25, e_kappa = 0.01;
    energy->add_option("--seq", e_seq)->required();
    energy->add_option("--grid", e_grid, "comma list of truncations")->required();
    energy->add_option("--eps0", e_eps0, "sub-cubic margin");
    energy->add_option("--kappa", e_kappa, "near-cubic lower bound on E/N^3");
    energy->add_option("--out", e_out)->required();

    // ---- construct -----------------------------------------------------
    auto* construct = app.add_subcommand("construct", "build the level construction");
    std::string c_family = "qa1", c_C = "1", c_K = "1", c_step = "1", c_base = "1", c_mode = "strict", c_out;
    u64 c_levels = 3, c_m1 = 8, c_block = 0, c_seed = 0, c_budget = 200000;
    construct->add_option("--family", c_family, "qa1 (Definition-1 data)");
    construct->add_option("--C", c_C)->required();
    construct->add_option("--K", c_K)->required();
    construct->add_option("--step", c_step);
    construct->add_option("--base", c_base);
    construct->add_option("--levels", c_levels);
    construct->add_option("--mode", c_mode, "strict|relaxed");
    construct->add_option("--m1", c_m1, "first level size");
    construct->add_option("--block", c_block, "qa1 block size (default m1)");
    construct->add_option("--seed", c_seed, "qa1 tail seed");
    construct->add_option("--budget", c_budget, "cap on level sizes M_l");
    construct->add_option("--out", c_out)->required();

    // ---- star ----------------------------------------------------------
    auto* star = app.add_subcommand("star", "verify the weighted divergence condition");
    std::string st_state, st_c = "0.1", st_out;
    u64 st_N = 0;
    star->add_option("--state", st_state)->required();
    star->add_option("--N", st_N, "prefix length (default: all)");
    star->add_option("--c", st_c, "threshold constant");
    star->add_option("--out", st_out)->required();

    // ---- hits ----------------------------------------------------------
    auto* hits = app.add_subcommand("hits", "find ||lambda_n alpha|| <= psi_n over random alphas");
    std::string h_state, h_out;
    u64 h_seed = 0, h_count = 100;
    u32 h_bits = 0;
    hits->add_option("--state", h_state)->required();
    hits->add_option("--alpha-seed", h_seed)->required();
    hits->add_option("--count", h_count, "number of alpha samples");
    hits->add_option("--bits", h_bits, "alpha resolution (default: auto)");
    hits->add_option("--out", h_out)->required();

    // ---- witness -------------------------------------------------------
    auto* witness = app.add_subcommand("witness", "non-Poissonian witness window for one hit");
    std::string w_state, w_alpha_json, w_out;
    u64 w_seed = 0, w_hit = 0;
    u32 w_bits = 0;
    bool w_have_seed = false;
    witness->add_option("--state", w_state)->required();
    witness->add_option("--alpha-json", w_alpha_json);
    witness->add_option("--alpha-seed", w_seed)->each([&](const std::string&) { w_have_seed = true; });
    witness->add_option("--bits", w_bits, "alpha resolution (default: auto)");
    witness->add_option("--hit", w_hit, "1-based index into lambda")->required();
    witness->add_option("--out", w_out)->required();

    // ---- sweep ---------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "Poissonian deviation over random alphas");
    std::string sw_seq, sw_grid = "0:3:0.1", sw_out;
    u64 sw_alphas = 10, sw_seed = 0, sw_n = 0;
    u32 sw_bits = 128;
    bool sw_have_seed = false;
    sweep->add_option("--seq", sw_seq)->required();
    sweep->add_option("--alphas", sw_alphas, "number of alpha samples");
    sweep->add_option("--bits", sw_bits);
    sweep->add_option("--seed", sw_seed)->required()->each([&](const std::string&) { sw_have_seed = true; });
    sweep->add_option("--n", sw_n, "use only the first n values");
    sweep->add_option("--s-grid", sw_grid);
    sweep->add_option("--out", sw_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("usage", e.what());
        std::cerr << "Run with --help for usage.\n";
        return 2;
    }

    try {
        if (gen->parsed()) {
            Family fam = family_from_name(g_family);
            IntSeq seq;
            if (fam == Family::polynomial) {
                std::vector<Int> coeffs;
                std::stringstream ss(g_coeffs);
                std::string item;
                while (std::getline(ss, item, ',')) coeffs.push_back(parse_int(item));
                seq = gen_polynomial(coeffs, g_n);
            } else if (fam == Family::lacunary) {
                seq = gen_lacunary(parse_int(g_base), g_n);
            } else if (fam == Family::quasi_arithmetic) {
                if (!g_have_seed)
                    throw CLI::ValidationError("gen", "--seed is mandatory for qa1");
                u64 block = g_block ? g_block : g_n;
                seq = gen_quasi_arithmetic_deg1(parse_rational(g_C), parse_rational(g_K),
                                                parse_int(g_step), parse_int(g_base_qa), block,
                                                g_n, g_seed);
            } else if (fam == Family::sidon) {
                seq = gen_sidon_greedy(g_n);
            } else {
                throw CLI::ValidationError("gen", "unsupported family");
            }
            write_json(g_out, seq_to_json(seq));
        } else if (alpha->parsed()) {
            FixedPointAlpha a;
            if (a_random) {
                if (!a_have_seed) throw CLI::ValidationError("alpha", "--random requires --seed");
                a = alpha_random(a_bits, a_seed);
            } else if (!a_sqrt.empty()) {
                a = alpha_quadratic(parse_int(a_sqrt), a_bits);
            } else if (a_golden) {
                a = alpha_golden(a_bits);
            } else if (!a_ratio.empty()) {
                auto slash = a_ratio.find('/');
                if (slash == std::string::npos)
                    throw CLI::ValidationError("alpha", "--rational expects p/q");
                a = alpha_rational(parse_int(a_ratio.substr(0, slash)),
                                   parse_int(a_ratio.substr(slash + 1)), a_bits);
            } else {
                throw CLI::ValidationError("alpha", "choose --random, --sqrt, --golden or --rational");
            }
            write_json(a_out, alpha_to_json(a));
        } else if (points->parsed()) {
            IntSeq seq = seq_from_json(read_json(p_seq));
            FixedPointAlpha a = alpha_from_json(read_json(p_alpha));
            write_points(fractional_parts(seq, a, p_n), p_out);
        } else if (r2->parsed()) {
            TorusPointSet ps = read_points(r_points);
            auto grid = parse_s_grid(r_grid);
            PairCorrelationCurve curve;
            if (r_naive) {
                curve.s_grid = grid;
                curve.n = ps.size();
                for (const Rat& s : grid) curve.r2_values.push_back(r2_naive(ps, s));
            } else {
                curve = r2_curve(ps, grid);
            }
            write_text(r_out, curve_to_csv(curve));
        } else if (spacings->parsed()) {
            TorusPointSet ps = read_points(sp_points);
            write_json(sp_out, spacing_to_json(gap_structure(ps)));
        } else if (energy->parsed()) {
            IntSeq seq = seq_from_json(read_json(e_seq));
            auto prof = energy_profile(seq, parse_u64_list(e_grid));
            write_json(e_out, profile_to_json(prof, classify(prof, e_eps0, e_kappa)));
        } else if (construct->parsed()) {
            if (family_from_name(c_family) != Family::quasi_arithmetic)
                throw CLI::ValidationError("construct", "only qa1 carries Definition-1 data");
            u64 block = c_block ? c_block : c_m1;
            QaParams qa{parse_rational(c_C), parse_rational(c_K), parse_int(c_step),
                        parse_int(c_base), block, c_seed};
            ConstructionState st =
                build_levels(qa, c_levels, growth_mode_from_name(c_mode), c_m1, c_budget);
            write_json(c_out, state_to_json(st));
        } else if (star->parsed()) {
            ConstructionState st = state_from_json(read_json(st_state));
            u64 N = st_N ? st_N : st.size();
            StarReport rep = verify_condition_star(st, N, parse_rational(st_c));
            write_json(st_out, star_to_json(rep));
            if (!rep.pass) {
                emit_error("star-condition-failed", "ratio " + dec(rep.ratio) + " <= c");
                return 1;
            }
        } else if (hits->parsed()) {
            ConstructionState st = state_from_json(read_json(h_state));
            u32 bits = h_bits ? h_bits : ((bit_length(st.lambda.back()) + 64 + 63) / 64) * 64;
            Json out;
            out["schema_version"] = kSchemaVersion;
            out["bits"] = bits;
            out["count"] = h_count;
            Json per_alpha = Json::array();
            u64 with_hit = 0;
            std::vector<std::vector<Hit>> all(h_count);
            std::vector<u64> seeds(h_count);
            for (u64 i = 0; i < h_count; ++i) seeds[i] = derive_seed(h_seed, i);
#pragma omp parallel for schedule(dynamic)
            for (i64 i = 0; i < static_cast<i64>(h_count); ++i)
                all[i] = find_hits(st, alpha_random(bits, seeds[i]));
            for (u64 i = 0; i < h_count; ++i) {  // ordered merge
                Json rec;
                rec["alpha_seed"] = seeds[i];
                Json hs = Json::array();
                for (const auto& h : all[i]) hs.push_back(hit_to_json(h));
                rec["hits"] = hs;
                per_alpha.push_back(rec);
                if (!all[i].empty()) ++with_hit;
            }
            out["alphas"] = per_alpha;
            out["hit_fraction"] = static_cast<double>(with_hit) / static_cast<double>(h_count);
            write_json(h_out, out);
        } else if (witness->parsed()) {
            ConstructionState st = state_from_json(read_json(w_state));
            u32 bits = w_bits ? w_bits : ((bit_length(st.lambda.back()) + 64 + 63) / 64) * 64;
            FixedPointAlpha a = alpha_from_flags(w_alpha_json, w_seed, bits, w_have_seed);
            if (w_hit == 0 || w_hit > st.size())
                throw CLI::ValidationError("witness", "--hit out of range");
            auto hits_found = find_hits(st, a);
            const Hit* target = nullptr;
            for (const auto& h : hits_found)
                if (h.index == w_hit - 1) target = &h;
            if (!target) {
                emit_error("not-a-hit", "lambda index " + std::to_string(w_hit) +
                                            " is not a hit for this alpha");
                return 1;
            }
            WitnessReport rep = witness_non_poissonian(st, a, *target);
            write_json(w_out, witness_to_json(rep));
            if (!rep.inequality_holds) {
                emit_error("witness-bound-failed",
                           "deviation bound failed (small-level caveat applies)");
                return 1;
            }
        } else if (sweep->parsed()) {
            if (!sw_have_seed) throw CLI::ValidationError("sweep", "--seed is mandatory");
            IntSeq seq = seq_from_json(read_json(sw_seq));
            auto grid = parse_s_grid(sw_grid);
            std::vector<SweepResult> results(sw_alphas);
#pragma omp parallel for schedule(dynamic)
            for (i64 i = 0; i < static_cast<i64>(sw_alphas); ++i) {
                u64 seed = derive_seed(sw_seed, i);
                FixedPointAlpha a = alpha_random(sw_bits, seed);
                auto ps = fractional_parts(seq, a, sw_n);
                results[i] = {static_cast<u64>(i), seed,
                              poissonian_deviation(r2_curve_serial(ps, grid))};
            }
            std::vector<double> devs;
            for (const auto& r : results) devs.push_back(r.deviation);
            std::vector<double> sorted = devs;
            std::sort(sorted.begin(), sorted.end());
            Json out;
            out["schema_version"] = kSchemaVersion;
            out["alphas"] = sw_alphas;
            out["bits"] = sw_bits;
            Json per = Json::array();
            for (const auto& r : results) {
                Json rec;
                rec["index"] = r.index;
                rec["alpha_seed"] = r.seed;
                rec["deviation"] = r.deviation;
                per.push_back(rec);
            }
            out["per_alpha"] = per;
            out["min"] = sorted.front();
            out["median"] = sorted[sorted.size() / 2];
            out["max"] = sorted.back();
            write_json(sw_out, out);
        }
    } catch (const CLI::ValidationError& e) {
        emit_error("usage", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error("invalid-config", e.what());
        return 2;
    } catch (const std::overflow_error& e) {
        emit_error("resource-limit", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return 1;
    }
    return 0;
}
