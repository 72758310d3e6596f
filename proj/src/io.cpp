#include "pcorr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pcorr {

Rat parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num = parse_int(s.substr(0, slash));
        Int den = parse_int(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
        return make_rat(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(parse_int(s));
    std::string head = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (frac.empty()) return Rat(parse_int(head));
    bool neg = !head.empty() && head[0] == '-';
    Int ip = head.empty() || head == "-" ? Int(0) : parse_int(head);
    if (neg) ip = -ip;
    Int fp = parse_int(frac);
    if (fp < 0) throw std::invalid_argument("parse_rational: malformed decimal");
    Int den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    Rat r = Rat(ip) + make_rat(fp, den);
    return neg ? Rat(-r) : r;
}

// ---------------------------------------------------------------------------

static Json rat_json(const Rat& q) { return dec(q); }
static Rat rat_from(const Json& j) { return parse_rational(j.get<std::string>()); }

Json seq_to_json(const IntSeq& seq) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["family"] = family_name(seq.family);
    Json params = Json::object();
    if (seq.family == Family::polynomial) {
        Json coeffs = Json::array();
        for (const Int& c : seq.poly_coeffs) coeffs.push_back(dec(c));
        params["coeffs"] = coeffs;
    } else if (seq.family == Family::lacunary) {
        params["base"] = dec(seq.lacunary_base);
    } else if (seq.family == Family::quasi_arithmetic && seq.qa) {
        params["C"] = rat_json(seq.qa->C);
        params["K"] = rat_json(seq.qa->K);
        params["step"] = dec(seq.qa->step);
        params["base"] = dec(seq.qa->base);
        params["block"] = seq.qa->block;
        params["seed"] = seq.qa->seed;
    }
    j["params"] = params;
    Json values = Json::array();
    for (const Int& v : seq.values) values.push_back(dec(v));
    j["values"] = values;
    return j;
}

IntSeq seq_from_json(const Json& j) {
    IntSeq s;
    s.family = family_from_name(j.at("family").get<std::string>());
    const Json& params = j.at("params");
    if (s.family == Family::polynomial) {
        for (const auto& c : params.at("coeffs")) s.poly_coeffs.push_back(parse_int(c.get<std::string>()));
    } else if (s.family == Family::lacunary) {
        s.lacunary_base = parse_int(params.at("base").get<std::string>());
    } else if (s.family == Family::quasi_arithmetic) {
        QaParams p;
        p.C = rat_from(params.at("C"));
        p.K = rat_from(params.at("K"));
        p.step = parse_int(params.at("step").get<std::string>());
        p.base = parse_int(params.at("base").get<std::string>());
        p.block = params.at("block").get<u64>();
        p.seed = params.at("seed").get<u64>();
        s.qa = p;
    }
    for (const auto& v : j.at("values")) s.values.push_back(parse_int(v.get<std::string>()));
    s.check_invariants();
    return s;
}

Json alpha_to_json(const FixedPointAlpha& a) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["bits"] = a.bits;
    j["x"] = dec(a.x);
    j["provenance"] = a.provenance;
    j["approx"] = a.approx();
    return j;
}

FixedPointAlpha alpha_from_json(const Json& j) {
    FixedPointAlpha a;
    a.bits = j.at("bits").get<u32>();
    a.x = parse_int(j.at("x").get<std::string>());
    a.provenance = j.value("provenance", "unknown");
    if (a.x < 0 || a.x >= pow2(a.bits))
        throw std::invalid_argument("alpha_from_json: x out of [0, 2^bits)");
    return a;
}

Json state_to_json(const ConstructionState& st) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["C"] = rat_json(st.C);
    j["K"] = rat_json(st.K);
    j["c1"] = rat_json(st.c1);
    j["c2"] = rat_json(st.c2);
    j["c4"] = st.c4;
    j["mode"] = growth_mode_name(st.mode);
    j["conforming"] = st.mode == GrowthMode::strict;
    j["m1"] = st.m1;
    j["budget"] = st.budget;
    Json qa;
    qa["C"] = rat_json(st.qa.C);
    qa["K"] = rat_json(st.qa.K);
    qa["step"] = dec(st.qa.step);
    qa["base"] = dec(st.qa.base);
    qa["block"] = st.qa.block;
    qa["seed"] = st.qa.seed;
    j["family"] = qa;
    Json levels = Json::array();
    for (const auto& lev : st.levels) {
        Json L;
        L["M"] = lev.M;
        L["kappa"] = dec(lev.kappa);
        L["base"] = dec(lev.base);
        L["s"] = lev.s;
        L["w"] = lev.w();
        L["multiplicity_threshold"] = rat_json(lev.mult_threshold);
        Json R = Json::array();
        for (u64 r : lev.R) R.push_back(std::to_string(r));
        L["R"] = R;
        levels.push_back(L);
    }
    j["levels"] = levels;
    return j;
}

ConstructionState state_from_json(const Json& j) {
    ConstructionState st;
    st.C = rat_from(j.at("C"));
    st.K = rat_from(j.at("K"));
    st.c1 = rat_from(j.at("c1"));
    st.c2 = rat_from(j.at("c2"));
    st.c4 = j.at("c4").get<double>();
    st.mode = growth_mode_from_name(j.at("mode").get<std::string>());
    st.m1 = j.at("m1").get<u64>();
    st.budget = j.at("budget").get<u64>();
    const Json& qa = j.at("family");
    st.qa.C = rat_from(qa.at("C"));
    st.qa.K = rat_from(qa.at("K"));
    st.qa.step = parse_int(qa.at("step").get<std::string>());
    st.qa.base = parse_int(qa.at("base").get<std::string>());
    st.qa.block = qa.at("block").get<u64>();
    st.qa.seed = qa.at("seed").get<u64>();
    for (const auto& L : j.at("levels")) {
        LevelRecord lev;
        lev.M = L.at("M").get<u64>();
        lev.kappa = parse_int(L.at("kappa").get<std::string>());
        lev.base = parse_int(L.at("base").get<std::string>());
        lev.s = L.at("s").get<u64>();
        lev.mult_threshold = rat_from(L.at("multiplicity_threshold"));
        for (const auto& r : L.at("R")) lev.R.push_back(std::stoull(r.get<std::string>()));
        for (u64 r : lev.R) {
            st.lambda.push_back(Int(static_cast<unsigned long>(r)) * lev.kappa);
            st.level_of.push_back(static_cast<u32>(st.levels.size()));
        }
        st.levels.push_back(std::move(lev));
    }
    st.check_invariants();
    return st;
}

Json spacing_to_json(const SpacingStats& st) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["n"] = st.n;
    j["distinct_gap_count"] = st.distinct_gap_count;
    j["ks_to_exponential"] = st.ks_to_exponential;
    j["min_normalized_gap"] = st.normalized_gaps.front().get_d();
    j["max_normalized_gap"] = st.normalized_gaps.back().get_d();
    return j;
}

Json profile_to_json(const EnergyProfile& prof, EnergyClass cls) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    Json recs = Json::array();
    for (const auto& r : prof.records) {
        Json rec;
        rec["n"] = r.n;
        rec["energy"] = dec(r.energy);
        rec["energy_over_n3"] = rat_json(r.energy_over_n3);
        rec["energy_over_n3_float"] = r.energy_over_n3.get_d();
        recs.push_back(rec);
    }
    j["records"] = recs;
    j["fitted_exponent"] = prof.fitted_exponent;
    j["fit_residual"] = prof.fit_residual;
    j["classification"] = energy_class_name(cls);
    return j;
}

Json star_to_json(const StarReport& rep) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["N"] = rep.N;
    j["lhs"] = rat_json(rep.lhs);
    j["rhs"] = rat_json(rep.rhs);
    j["ratio"] = rat_json(rep.ratio);
    j["ratio_float"] = rep.ratio.get_d();
    j["c"] = rat_json(rep.c);
    j["pass"] = rep.pass;
    j["c4"] = rep.c4;
    j["sum_psi"] = rat_json(rep.sum_psi);
    j["lhs_no_tau"] = rat_json(rep.lhs_no_tau);
    j["mu_half_phi_violations"] = rep.mu_half_phi_violations;
    Json mu = Json::array();
    for (u64 m : rep.mu) mu.push_back(m);
    j["mu"] = mu;
    Json g = Json::array();
    for (const Rat& q : rep.level_phi_avg) {
        Json e;
        e["exact"] = rat_json(q);
        e["float"] = q.get_d();
        g.push_back(e);
    }
    j["level_phi_avg"] = g;
    return j;
}

Json hit_to_json(const Hit& h) {
    Json j;
    j["index"] = h.index + 1;  // 1-based in reports
    j["level"] = h.level + 1;
    j["lambda"] = dec(h.lambda);
    j["nearest_m"] = dec(h.nearest_m);
    j["dist"] = dec(h.dist);
    return j;
}

Json witness_to_json(const WitnessReport& rep) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["hit_index"] = rep.hit_index + 1;
    j["level"] = rep.level + 1;
    j["M_l"] = rep.M_l;
    j["M"] = rep.M;
    j["rho"] = rat_json(rep.rho);
    j["rho_float"] = rep.rho.get_d();
    j["case"] = rep.rho_zero_case ? "rho_zero" : "rho_positive";
    j["inequality_holds"] = rep.inequality_holds;
    j["l0_caveat"] = rep.l0_caveat;
    j["claim"] = "deviation witness at scale M_l (single scale, not a limit)";
    if (rep.rho_zero_case) {
        j["s"] = rat_json(rep.s);
        j["r2"] = rat_json(rep.r2);
        j["r2_float"] = rep.r2.get_d();
        j["r2_bound"] = rat_json(rep.r2_bound);
    } else {
        j["eps"] = rat_json(rep.eps);
        j["s1"] = rat_json(rep.s1);
        j["s2"] = rat_json(rep.s2);
        j["lambda1"] = rat_json(rep.lambda1);
        j["lambda2"] = rat_json(rep.lambda2);
        j["deviation"] = rat_json(rep.deviation);
        j["deviation_float"] = rep.deviation.get_d();
        j["dev_bound"] = rat_json(rep.dev_bound);
        j["window_gain"] = rat_json(rep.window_gain);
    }
    return j;
}

std::string curve_to_csv(const PairCorrelationCurve& curve) {
    std::ostringstream out;
    out << "s_num,s_den,r2_num,r2_den,r2_float\n";
    char buf[64];
    for (size_t i = 0; i < curve.s_grid.size(); ++i) {
        const Rat& s = curve.s_grid[i];
        const Rat& r = curve.r2_values[i];
        std::snprintf(buf, sizeof buf, "%.17g", r.get_d());
        out << s.get_num().get_str() << ',' << s.get_den().get_str() << ','
            << r.get_num().get_str() << ',' << r.get_den().get_str() << ',' << buf << '\n';
    }
    return out.str();
}

// --- binary point sets -------------------------------------------------------

namespace {

void put_u32(std::string& out, u32 v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, u64 v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

void write_points(const TorusPointSet& ps, const std::string& path) {
    std::string out;
    size_t bytes = (ps.bits + 7) / 8;
    out.reserve(12 + bytes * ps.size());
    put_u32(out, ps.bits);
    put_u64(out, ps.size());
    std::vector<unsigned char> buf(bytes);
    for (const Int& p : ps.points) {
        std::fill(buf.begin(), buf.end(), 0);
        size_t written = 0;
        // least-significant word first, little-endian bytes
        mpz_export(buf.data(), &written, -1, 1, -1, 0, p.get_mpz_t());
        out.append(reinterpret_cast<const char*>(buf.data()), bytes);
    }
    write_text(path, out);
}

TorusPointSet read_points(const std::string& path) {
    std::string in = read_text(path);
    if (in.size() < 12) throw std::invalid_argument("read_points: truncated header");
    auto u8 = [&](size_t i) { return static_cast<u64>(static_cast<unsigned char>(in[i])); };
    u32 bits = 0;
    for (int i = 0; i < 4; ++i) bits |= static_cast<u32>(u8(i)) << (8 * i);
    u64 n = 0;
    for (int i = 0; i < 8; ++i) n |= u8(4 + i) << (8 * i);
    size_t bytes = (bits + 7) / 8;
    if (in.size() != 12 + bytes * n)
        throw std::invalid_argument("read_points: size mismatch");
    TorusPointSet ps;
    ps.bits = bits;
    ps.points.reserve(n);
    Int two_B = pow2(bits);
    for (u64 i = 0; i < n; ++i) {
        Int p;
        mpz_import(p.get_mpz_t(), bytes, -1, 1, -1, 0, in.data() + 12 + i * bytes);
        if (p >= two_B) throw std::invalid_argument("read_points: point out of range");
        if (i > 0 && p < ps.points.back())
            throw std::invalid_argument("read_points: points not sorted");
        ps.points.push_back(std::move(p));
    }
    return ps;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Json read_json(const std::string& path) { return Json::parse(read_text(path)); }

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<Rat> parse_s_grid(const std::string& spec) {
    auto c1 = spec.find(':');
    if (c1 != std::string::npos) {
        auto c2 = spec.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw std::invalid_argument("parse_s_grid: expected start:stop:step");
        return make_s_grid(parse_rational(spec.substr(0, c1)),
                           parse_rational(spec.substr(c1 + 1, c2 - c1 - 1)),
                           parse_rational(spec.substr(c2 + 1)));
    }
    std::vector<Rat> grid;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(parse_rational(item));
    if (grid.empty()) throw std::invalid_argument("parse_s_grid: empty grid");
    return grid;
}

std::vector<u64> parse_u64_list(const std::string& spec) {
    std::vector<u64> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    if (out.empty()) throw std::invalid_argument("parse_u64_list: empty list");
    return out;
}

}  // namespace pcorr
