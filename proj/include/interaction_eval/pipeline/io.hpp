// Copyright 2026 The Interaction Eval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INTERACTION_EVAL_PIPELINE_IO_HPP
#define INTERACTION_EVAL_PIPELINE_IO_HPP

// Trajectory CSV ingestion, manifests, configuration files and atomic
// file output.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "interaction_eval/calibration/calibration.hpp"
#include "interaction_eval/core/genetic.hpp"
#include "interaction_eval/core/trajectory.hpp"
#include "interaction_eval/game/config.hpp"
#include "interaction_eval/risk/risk_field.hpp"

namespace interaction_eval::io {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV helpers

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    auto b = f.find_first_not_of(" \t");
    auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Column positions of a CSV header.
class Header {
 public:
  explicit Header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) index_[names[i]] = i;
  }
  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t require(const std::string& name, const std::string& source) const {
    auto i = find(name);
    if (!i) raise(ErrorKind::kParse, source + ": missing required column '" + name + "'");
    return *i;
  }

 private:
  std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Trajectory CSV

inline constexpr const char* kTrajectoryColumns[] = {
    "scenario_id", "vehicle_role", "t", "x", "y", "v", "theta", "length", "width"};

struct IngestOptions {
  double dt = kDefaultDt;
  std::string dataset;
  std::optional<Point2> conflict_point;
  std::vector<StaticObject> static_objects;
  std::array<Polyline, 2> reference_paths;
  double conflict_gate = kDefaultConflictGate;
};

struct IngestResult {
  std::vector<ScenarioRecord> scenarios;
  std::vector<std::string> warnings;
};

/// Builds scenarios from CSV text. Rows are grouped by scenario id; each
/// scenario needs both roles. Trajectories are put on a common uniform
/// grid starting at the later of the two first samples; non-uniform or
/// differently sampled input is resampled with a warning.
inline IngestResult parse_trajectory_csv(std::istream& in, const std::string& source,
                                         const IngestOptions& opt = {}) {
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::kParse, source + ": empty file");
  const Header header(split_csv_line(line));
  std::map<std::string, std::size_t> col;
  for (const char* name : kTrajectoryColumns) col[name] = header.require(name, source);
  const auto a_col = header.find("a");

  struct Raw {
    std::array<std::vector<VehicleState>, 2> traj;
    std::array<std::optional<VehicleGeometry>, 2> geometry;
    bool has_a = true;
  };
  std::map<std::string, Raw> raw;
  std::vector<std::string> order;

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    const std::string where = source + " row " + std::to_string(row);
    auto field = [&](const std::string& name) -> const std::string& {
      std::size_t i = col.at(name);
      if (i >= fields.size()) raise(ErrorKind::kParse, where + ": missing value for '" + name + "'");
      return fields[i];
    };
    auto number = [&](const std::string& name) {
      auto v = parse_double(field(name));
      if (!v || !std::isfinite(*v))
        raise(ErrorKind::kParse, where + ": column '" + name + "' is not a number");
      return *v;
    };
    const std::string id = field("scenario_id");
    if (id.empty()) raise(ErrorKind::kParse, where + ": empty scenario_id");
    auto role = role_from_string(field("vehicle_role"));
    if (!role)
      raise(ErrorKind::kParse, where + ": vehicle_role must be left_turn or straight, got '" +
                                   field("vehicle_role") + "'");
    VehicleState st;
    st.t = number("t");
    st.x = number("x");
    st.y = number("y");
    st.v = number("v");
    st.theta = number("theta");
    if (st.v < 0) raise(ErrorKind::kParse, where + ": negative speed");
    VehicleGeometry g{number("length"), number("width")};
    if (!(g.length > 0) || !(g.width > 0))
      raise(ErrorKind::kParse, where + ": length and width must be positive");

    if (!raw.count(id)) order.push_back(id);
    Raw& r = raw[id];
    const int i = static_cast<int>(*role);
    if (a_col && *a_col < fields.size() && !fields[*a_col].empty()) {
      auto a = parse_double(fields[*a_col]);
      if (!a || !std::isfinite(*a)) raise(ErrorKind::kParse, where + ": column 'a' is not a number");
      st.a = *a;
    } else {
      r.has_a = false;
    }
    if (!r.traj[i].empty() && !(st.t > r.traj[i].back().t))
      raise(ErrorKind::kParse, where + ": timestamps must increase per vehicle");
    if (!r.geometry[i]) r.geometry[i] = g;
    r.traj[i].push_back(st);
  }

  IngestResult out;
  for (const auto& id : order) {
    Raw& r = raw[id];
    ScenarioRecord rec;
    rec.scenario_id = id;
    rec.dataset = opt.dataset;
    rec.dt = opt.dt;
    for (int i = 0; i < 2; ++i) {
      if (r.traj[i].empty())
        raise(ErrorKind::kParse, source + ": scenario '" + id + "' has no " +
                                     to_string(static_cast<Role>(i)) + " rows");
      rec.geometry[i] = *r.geometry[i];
    }
    const double t_start = std::max(r.traj[0].front().t, r.traj[1].front().t);
    for (int i = 0; i < 2; ++i) {
      auto& tr = r.traj[i];
      if (t_start > tr.back().t)
        raise(ErrorKind::kParse, source + ": scenario '" + id + "' trajectories do not overlap in time");
      const bool uniform = is_uniform(tr, opt.dt);
      if (!uniform)
        out.warnings.push_back(source + ": scenario '" + id + "' " +
                               to_string(static_cast<Role>(i)) +
                               " trajectory is not uniformly sampled at dt=" +
                               format_double(opt.dt) + " s; resampled");
      else if (std::abs(tr.front().t - t_start) > 1e-9)
        out.warnings.push_back(source + ": scenario '" + id + "' " +
                               to_string(static_cast<Role>(i)) + " trimmed to common start t=" +
                               format_double(t_start));
      auto res = resample_trajectory(tr, opt.dt, t_start);
      if (uniform && !r.has_a) derive_rates(res, opt.dt);
      rec.trajectories[i] = std::move(res);
    }
    rec.static_objects = opt.static_objects;
    rec.reference_paths = opt.reference_paths;
    try {
      locate_conflict(rec, opt.conflict_point, opt.conflict_gate);
      validate(rec);
    } catch (const Error& e) {
      throw Error(e.kind(), source + ": scenario '" + id + "': " + e.what());
    }
    out.scenarios.push_back(std::move(rec));
  }
  return out;
}

inline IngestResult ingest_csv(const fs::path& path, const IngestOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kIo, "cannot open " + path.string());
  return parse_trajectory_csv(in, path.string(), opt);
}

/// Writes scenarios in the trajectory CSV schema, with the `a` column.
inline void write_trajectory_csv(std::ostream& os, const std::vector<ScenarioRecord>& scenarios) {
  os << "scenario_id,vehicle_role,t,x,y,v,theta,length,width,a\n";
  for (const auto& rec : scenarios) {
    for (int i = 0; i < 2; ++i) {
      for (const auto& st : rec.trajectories[i]) {
        os << rec.scenario_id << ',' << to_string(static_cast<Role>(i)) << ','
           << format_double(st.t) << ',' << format_double(st.x) << ',' << format_double(st.y)
           << ',' << format_double(st.v) << ',' << format_double(st.theta) << ','
           << format_double(rec.geometry[i].length) << ','
           << format_double(rec.geometry[i].width) << ',' << format_double(st.a) << '\n';
      }
    }
  }
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace detail {

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    raise(ErrorKind::kParse, where + "." + key + ": " + e.what());
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& where) {
  if (!j.is_object()) raise(ErrorKind::kParse, where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* n : known) ok = ok || k == n;
    if (!ok) raise(ErrorKind::kParse, where + ": unknown key '" + k + "'");
  }
}

inline Point2 read_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    raise(ErrorKind::kParse, where + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Polyline read_polyline(const json& j, const std::string& where) {
  if (!j.is_array()) raise(ErrorKind::kParse, where + " must be a list of points");
  Polyline p;
  for (std::size_t i = 0; i < j.size(); ++i)
    p.push_back(read_point(j[i], where + "[" + std::to_string(i) + "]"));
  return p;
}

}  // namespace detail

inline GameConfig parse_game_config(const json& j, GameConfig c = {}) {
  const std::string w = "game";
  detail::reject_unknown(j, {"strategy_accels", "m_weight", "n_weight", "v_max", "a_max",
                             "t_avoid", "epsilon", "dt", "game_type", "rationality",
                             "safety_metric", "pet_cap", "max_steps", "geometric_t_avoid",
                             "conflict_zone_width", "infeasible_payoff"},
                         w);
  detail::read(j, "strategy_accels", c.strategy_accels, w);
  detail::read(j, "m_weight", c.m_weight, w);
  detail::read(j, "n_weight", c.n_weight, w);
  detail::read(j, "v_max", c.v_max, w);
  detail::read(j, "a_max", c.a_max, w);
  detail::read(j, "t_avoid", c.t_avoid, w);
  detail::read(j, "epsilon", c.epsilon, w);
  detail::read(j, "dt", c.dt, w);
  detail::read(j, "pet_cap", c.pet_cap, w);
  detail::read(j, "max_steps", c.max_steps, w);
  detail::read(j, "geometric_t_avoid", c.geometric_t_avoid, w);
  detail::read(j, "conflict_zone_width", c.conflict_zone_width, w);
  detail::read(j, "infeasible_payoff", c.infeasible_payoff, w);
  std::string s;
  if (j.contains("game_type")) {
    detail::read(j, "game_type", s, w);
    auto g = game_type_from_string(s);
    if (!g) raise(ErrorKind::kParse, "game.game_type: unknown value '" + s + "'");
    c.game_type = *g;
  }
  if (j.contains("rationality")) {
    detail::read(j, "rationality", s, w);
    auto r = rationality_from_string(s);
    if (!r) raise(ErrorKind::kParse, "game.rationality: unknown value '" + s + "'");
    c.rationality = *r;
  }
  if (j.contains("safety_metric")) {
    detail::read(j, "safety_metric", s, w);
    if (s == "risk_field") c.safety_metric = SafetyMetric::kRiskField;
    else if (s == "pet") c.safety_metric = SafetyMetric::kPet;
    else raise(ErrorKind::kParse, "game.safety_metric: unknown value '" + s + "'");
  }
  try {
    validate(c);
  } catch (const Error& e) {
    raise(ErrorKind::kParse, std::string("game: ") + e.what());
  }
  return c;
}

inline RiskParams parse_risk_params(const json& j, RiskParams p = {}) {
  const std::string w = "risk";
  detail::reject_unknown(j, {"w_now", "alpha_x", "alpha_y", "beta_x", "beta_y", "rear_factor"}, w);
  detail::read(j, "w_now", p.w_now, w);
  detail::read(j, "alpha_x", p.alpha_x, w);
  detail::read(j, "alpha_y", p.alpha_y, w);
  detail::read(j, "beta_x", p.beta_x, w);
  detail::read(j, "beta_y", p.beta_y, w);
  detail::read(j, "rear_factor", p.rear_factor, w);
  try {
    validate(p);
  } catch (const Error& e) {
    raise(ErrorKind::kParse, std::string("risk: ") + e.what());
  }
  return p;
}

inline GaConfig parse_ga_config(const json& j, GaConfig c = {}) {
  const std::string w = "ga";
  detail::reject_unknown(j, {"dna_size", "crossover_rate", "mutation_rate", "generations",
                             "population", "grid_step", "seed", "threads"},
                         w);
  detail::read(j, "dna_size", c.dna_size, w);
  detail::read(j, "crossover_rate", c.crossover_rate, w);
  detail::read(j, "mutation_rate", c.mutation_rate, w);
  detail::read(j, "generations", c.generations, w);
  detail::read(j, "population", c.population, w);
  detail::read(j, "grid_step", c.grid_step, w);
  detail::read(j, "seed", c.seed, w);
  detail::read(j, "threads", c.threads, w);
  try {
    validate(c);
  } catch (const Error& e) {
    raise(ErrorKind::kParse, std::string("ga: ") + e.what());
  }
  return c;
}

inline json to_json(const GameConfig& c) {
  return {{"strategy_accels", c.strategy_accels},
          {"m_weight", c.m_weight},
          {"n_weight", c.n_weight},
          {"v_max", c.v_max},
          {"a_max", c.a_max},
          {"t_avoid", c.t_avoid},
          {"epsilon", c.epsilon},
          {"dt", c.dt},
          {"game_type", to_string(c.game_type)},
          {"rationality", to_string(c.rationality)},
          {"safety_metric", to_string(c.safety_metric)},
          {"pet_cap", c.pet_cap},
          {"max_steps", c.max_steps},
          {"geometric_t_avoid", c.geometric_t_avoid},
          {"conflict_zone_width", c.conflict_zone_width},
          {"infeasible_payoff", c.infeasible_payoff}};
}

inline json to_json(const RiskParams& p) {
  return {{"w_now", p.w_now},     {"alpha_x", p.alpha_x}, {"alpha_y", p.alpha_y},
          {"beta_x", p.beta_x},   {"beta_y", p.beta_y},   {"rear_factor", p.rear_factor}};
}

inline json to_json(const GaConfig& c) {
  return {{"dna_size", c.dna_size},         {"crossover_rate", c.crossover_rate},
          {"mutation_rate", c.mutation_rate}, {"generations", c.generations},
          {"population", c.population},     {"grid_step", c.grid_step},
          {"seed", c.seed}};
}

/// Every tunable of a run. Sections missing from a file keep their defaults.
struct RunConfig {
  GameConfig game;
  RiskParams risk;
  GaConfig ga;
  double sociality_threshold = 0.05;
  double pet_radius = 2.0;
};

inline RunConfig parse_run_config(const json& j) {
  detail::reject_unknown(j, {"game", "risk", "ga", "evaluation"}, "config");
  RunConfig c;
  if (j.contains("game")) c.game = parse_game_config(j["game"]);
  if (j.contains("risk")) c.risk = parse_risk_params(j["risk"]);
  if (j.contains("ga")) c.ga = parse_ga_config(j["ga"]);
  if (j.contains("evaluation")) {
    const auto& e = j["evaluation"];
    detail::reject_unknown(e, {"sociality_threshold", "pet_radius"}, "evaluation");
    detail::read(e, "sociality_threshold", c.sociality_threshold, "evaluation");
    detail::read(e, "pet_radius", c.pet_radius, "evaluation");
    if (!(c.sociality_threshold >= 0) || !(c.pet_radius > 0))
      raise(ErrorKind::kParse, "evaluation: threshold must be >= 0 and pet_radius > 0");
  }
  return c;
}

inline json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

inline RunConfig load_run_config(const fs::path& path) { return parse_run_config(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Manifests

/// Scenario files plus per-file overrides, paths relative to the manifest.
inline IngestResult load_manifest(const fs::path& path, double dt = kDefaultDt) {
  const json j = read_json_file(path);
  detail::reject_unknown(j, {"dataset", "scenarios", "description"}, "manifest");
  if (!j.contains("scenarios") || !j["scenarios"].is_array())
    raise(ErrorKind::kParse, path.string() + ": manifest needs a 'scenarios' list");
  std::string dataset = path.stem().string();
  detail::read(j, "dataset", dataset, "manifest");

  IngestResult out;
  const fs::path base = path.parent_path();
  for (std::size_t n = 0; n < j["scenarios"].size(); ++n) {
    const json& e = j["scenarios"][n];
    const std::string w = "manifest.scenarios[" + std::to_string(n) + "]";
    detail::reject_unknown(e, {"file", "dataset", "conflict_point", "static_objects",
                               "reference_paths"},
                           w);
    if (!e.contains("file") || !e["file"].is_string()) raise(ErrorKind::kParse, w + ": missing 'file'");
    IngestOptions opt;
    opt.dt = dt;
    opt.dataset = dataset;
    detail::read(e, "dataset", opt.dataset, w);
    if (e.contains("conflict_point")) opt.conflict_point = detail::read_point(e["conflict_point"], w + ".conflict_point");
    if (e.contains("static_objects")) {
      for (const auto& o : e["static_objects"]) {
        StaticObject so;
        const std::string wo = w + ".static_objects";
        detail::reject_unknown(o, {"x", "y", "max_risk", "length", "width"}, wo);
        detail::read(o, "x", so.x, wo);
        detail::read(o, "y", so.y, wo);
        detail::read(o, "max_risk", so.max_risk, wo);
        detail::read(o, "length", so.length, wo);
        detail::read(o, "width", so.width, wo);
        opt.static_objects.push_back(so);
      }
    }
    if (e.contains("reference_paths")) {
      const auto& rp = e["reference_paths"];
      detail::reject_unknown(rp, {"left_turn", "straight"}, w + ".reference_paths");
      if (rp.contains("left_turn")) opt.reference_paths[0] = detail::read_polyline(rp["left_turn"], w + ".reference_paths.left_turn");
      if (rp.contains("straight")) opt.reference_paths[1] = detail::read_polyline(rp["straight"], w + ".reference_paths.straight");
    }
    fs::path file = base / e["file"].get<std::string>();
    IngestResult part = ingest_csv(file, opt);
    for (auto& s : part.scenarios) out.scenarios.push_back(std::move(s));
    for (auto& msg : part.warnings) out.warnings.push_back(std::move(msg));
  }
  return out;
}

/// A manifest (.json) or a single trajectory CSV.
inline IngestResult load_scenarios(const fs::path& path, double dt = kDefaultDt) {
  if (path.extension() == ".json") return load_manifest(path, dt);
  IngestOptions opt;
  opt.dt = dt;
  opt.dataset = path.stem().string();
  return ingest_csv(path, opt);
}

// ---------------------------------------------------------------------------
// Output

/// Writes `content` to `path` through a temporary file and a rename.
inline void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorKind::kIo, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) raise(ErrorKind::kIo, "failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) raise(ErrorKind::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    raise(ErrorKind::kIo, "cannot create directory " + dir.string());
}

}  // namespace interaction_eval::io

#endif  // INTERACTION_EVAL_PIPELINE_IO_HPP
