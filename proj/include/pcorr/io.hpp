// Serialization: JSON for sequences / alphas / construction states / reports
// (every exact quantity as a decimal string), CSV for pair-correlation
// curves, and a byte-exact binary point-set format:
//
//   offset 0   u32 LE   bits B
//   offset 4   u64 LE   point count n
//   offset 12  n * ceil(B/8) bytes, each point little-endian, ascending
#pragma once

#include "pcorr/construction.hpp"
#include "pcorr/energy.hpp"
#include "pcorr/paircorr.hpp"
#include "pcorr/sequences.hpp"
#include "pcorr/torus.hpp"

#include <json.hpp>

#include <string>

namespace pcorr {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;

Json seq_to_json(const IntSeq& seq);
IntSeq seq_from_json(const Json& j);

Json alpha_to_json(const FixedPointAlpha& a);
FixedPointAlpha alpha_from_json(const Json& j);

Json state_to_json(const ConstructionState& st);
ConstructionState state_from_json(const Json& j);

Json spacing_to_json(const SpacingStats& st);
Json profile_to_json(const EnergyProfile& prof, EnergyClass cls);
Json star_to_json(const StarReport& rep);
Json hit_to_json(const Hit& h);
Json witness_to_json(const WitnessReport& rep);

// CSV columns: s_num, s_den, r2_num, r2_den, r2_float
std::string curve_to_csv(const PairCorrelationCurve& curve);

void write_points(const TorusPointSet& ps, const std::string& path);
TorusPointSet read_points(const std::string& path);  // perm left empty

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);
Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

// "0:5:0.1" -> exact grid; single values and comma lists also accepted
std::vector<Rat> parse_s_grid(const std::string& spec);
std::vector<u64> parse_u64_list(const std::string& spec);

}  // namespace pcorr
