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

#ifndef INTERACTION_EVAL_PIPELINE_EVALUATE_HPP
#define INTERACTION_EVAL_PIPELINE_EVALUATE_HPP

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "interaction_eval/calibration/calibration.hpp"
#include "interaction_eval/game/rollout.hpp"
#include "interaction_eval/pipeline/io.hpp"
#include "interaction_eval/pipeline/statistics.hpp"
#include "interaction_eval/scoring/similarity.hpp"

namespace interaction_eval {

inline constexpr Rationality kAllCriteria[] = {Rationality::kSafetyFirst,
                                               Rationality::kEfficiencyFirst,
                                               Rationality::kComprehensive};
inline constexpr GameType kAllGameTypes[] = {GameType::kNonCooperative, GameType::kCooperative};

/// One driver's score under one criterion and game type.
struct ScoreRecord {
  std::string scenario_id;
  std::string dataset;
  Role role = Role::kLeftTurn;
  AbilityScore ability;
  bool available = true;
  std::string note;  // why the score is unavailable
};

inline std::string driver_id(const std::string& scenario_id, Role r) {
  return scenario_id + "/" + to_string(r);
}

// ---------------------------------------------------------------------------
// Sociality

enum class Sociality { kStrongerCompetition, kBalance, kStrongerCooperation, kUnclassified };

inline const char* to_string(Sociality s) {
  switch (s) {
    case Sociality::kStrongerCompetition: return "stronger_competition";
    case Sociality::kBalance: return "balance";
    case Sociality::kStrongerCooperation: return "stronger_cooperation";
    case Sociality::kUnclassified: return "unclassified";
  }
  return "?";
}

inline constexpr double kDefaultSocialityThreshold = 0.05;

/// Compares the comprehensive-criterion scores of the two frameworks on
/// the shifted scale (s + 1) / 2. A framework wins when its shifted score
/// exceeds the other by more than `threshold` times the smaller one.
inline Sociality classify_sociality(std::optional<double> nc_score, std::optional<double> c_score,
                                    double threshold = kDefaultSocialityThreshold) {
  if (!nc_score || !c_score) return Sociality::kUnclassified;
  const double nc = (*nc_score + 1.0) / 2.0;
  const double c = (*c_score + 1.0) / 2.0;
  const double margin = threshold * std::min(nc, c);
  if (c - nc > margin) return Sociality::kStrongerCooperation;
  if (nc - c > margin) return Sociality::kStrongerCompetition;
  return Sociality::kBalance;
}

// ---------------------------------------------------------------------------
// Post-encroachment time

struct Occupancy {
  double enter = 0.0;
  double exit = 0.0;
};

/// Time the first occupant leaves until the second arrives; 0 on overlap.
inline double pet_from_occupancy(const Occupancy& a, const Occupancy& b) {
  const Occupancy& first = a.enter <= b.enter ? a : b;
  const Occupancy& second = a.enter <= b.enter ? b : a;
  return std::max(0.0, second.enter - first.exit);
}

/// First stay of a trajectory inside the disc of `radius` around `center`,
/// with entry and exit times interpolated between samples.
inline std::optional<Occupancy> occupancy(std::span<const VehicleState> traj, const Point2& center,
                                          double radius) {
  auto inside = [&](std::size_t k) { return distance(traj[k].position(), center) <= radius; };
  auto crossing = [&](std::size_t k) {
    // Interpolated time of the boundary crossing between samples k and k+1.
    double d0 = distance(traj[k].position(), center) - radius;
    double d1 = distance(traj[k + 1].position(), center) - radius;
    double w = d0 == d1 ? 0.0 : std::clamp(d0 / (d0 - d1), 0.0, 1.0);
    return traj[k].t + w * (traj[k + 1].t - traj[k].t);
  };
  std::size_t k = 0;
  while (k < traj.size() && !inside(k)) ++k;
  if (k == traj.size()) return std::nullopt;
  Occupancy o;
  o.enter = k == 0 ? traj[0].t : crossing(k - 1);
  while (k < traj.size() && inside(k)) ++k;
  o.exit = k == traj.size() ? traj.back().t : crossing(k - 1);
  return o;
}

inline constexpr double kDefaultPetRadius = 2.0;

/// Post-encroachment time of the observed encounter at its conflict point.
inline double pet_of_event(const ScenarioRecord& s, double radius = kDefaultPetRadius) {
  auto a = occupancy(s.trajectories[0], s.conflict_point, radius);
  auto b = occupancy(s.trajectories[1], s.conflict_point, radius);
  if (!a || !b)
    raise(ErrorKind::kNoConflict, s.scenario_id + ": a vehicle never reaches the conflict region");
  return pet_from_occupancy(*a, *b);
}

// ---------------------------------------------------------------------------
// Per-scenario evaluation

struct ScenarioEvaluation {
  std::string scenario_id;
  std::string dataset;
  std::vector<ScoreRecord> scores;
  std::optional<double> pet;
  std::vector<std::string> warnings;
  int timeouts = 0;
};

namespace detail {
inline ActionSequence zeros_like(const ActionSequence& other) {
  return {std::vector<double>(other.size(), 0.0), other.dt};
}
}  // namespace detail

/// Scores both drivers of a scenario against the rational rollout for
/// every criterion and game type: twelve records, some possibly marked
/// unavailable. `cfg.game_type` and `cfg.rationality` are overridden.
inline ScenarioEvaluation evaluate_scenario(const ScenarioRecord& s, const GameConfig& cfg,
                                            const RiskParams& params,
                                            double pet_radius = kDefaultPetRadius) {
  ScenarioEvaluation out;
  out.scenario_id = s.scenario_id;
  out.dataset = s.dataset;
  const Encounter enc = Encounter::from(s);
  const auto players = initial_players(s, cfg);
  std::array<ActionSequence, 2> real{real_actions(s, Role::kLeftTurn),
                                     real_actions(s, Role::kStraight)};

  for (GameType g : kAllGameTypes) {
    for (Rationality r : kAllCriteria) {
      GameConfig c = cfg;
      c.game_type = g;
      c.rationality = r;
      RolloutResult roll = rollout_interaction(enc, players, c, params);
      if (roll.timed_out) {
        ++out.timeouts;
        out.warnings.push_back(s.scenario_id + ": rollout timed out (" + to_string(g) + ", " +
                               to_string(r) + ")");
      }
      for (int i = 0; i < 2; ++i) {
        ScoreRecord rec;
        rec.scenario_id = s.scenario_id;
        rec.dataset = s.dataset;
        rec.role = static_cast<Role>(i);
        rec.ability.driver_id = driver_id(s.scenario_id, rec.role);
        rec.ability.criterion = r;
        rec.ability.game_type = g;
        ActionSequence a = real[i];
        ActionSequence b = roll.actions[i];
        if (roll.timed_out) {
          rec.available = false;
          rec.note = "timeout";
        } else if (a.empty() && b.empty()) {
          rec.available = false;
          rec.note = "starts past conflict point";
        } else {
          if (a.empty()) a = detail::zeros_like(b);
          if (b.empty()) b = detail::zeros_like(a);
          auto [x, y] = pad_align(a, b);
          AbilityScore sc = ability_score(x, y);
          sc.driver_id = rec.ability.driver_id;
          sc.criterion = r;
          sc.game_type = g;
          rec.ability = sc;
        }
        out.scores.push_back(std::move(rec));
      }
    }
  }
  try {
    out.pet = pet_of_event(s, pet_radius);
  } catch (const Error& e) {
    out.warnings.push_back(e.what());
  }
  return out;
}

/// Evaluates scenarios on a pool of worker threads. Results keep the input
/// order, so the output does not depend on scheduling.
inline std::vector<ScenarioEvaluation> evaluate_all(std::span<const ScenarioRecord> scenarios,
                                                    const GameConfig& cfg,
                                                    const RiskParams& params,
                                                    double pet_radius = kDefaultPetRadius,
                                                    unsigned threads = 0) {
  std::vector<ScenarioEvaluation> out(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        out[i] = evaluate_scenario(scenarios[i], cfg, params, pet_radius);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, scenarios.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------------------
// Report

struct PetRecord {
  std::string scenario_id;
  std::string dataset;
  std::optional<double> pet;
};

struct EvaluationReport {
  std::vector<ScoreRecord> scores;
  std::vector<PetRecord> pet;
  std::vector<std::string> warnings;
  std::optional<std::vector<GaGeneration>> calibration_trace;
  double sociality_threshold = kDefaultSocialityThreshold;
  /// Free-form run description copied into summary.json.
  nlohmann::json run_info = nlohmann::json::object();
  int timeouts = 0;
};

inline EvaluationReport make_report(std::vector<ScenarioEvaluation> evals) {
  EvaluationReport r;
  for (auto& e : evals) {
    for (auto& s : e.scores) r.scores.push_back(std::move(s));
    r.pet.push_back({e.scenario_id, e.dataset, e.pet});
    for (auto& w : e.warnings) r.warnings.push_back(std::move(w));
    r.timeouts += e.timeouts;
  }
  return r;
}

struct DriverSociality {
  std::string driver_id;
  std::string dataset;
  std::optional<double> nc_score;
  std::optional<double> c_score;
  Sociality sociality = Sociality::kUnclassified;
};

/// Sociality of every driver from its comprehensive-criterion scores, in
/// order of first appearance.
inline std::vector<DriverSociality> sociality_of(const EvaluationReport& r) {
  std::vector<DriverSociality> out;
  std::map<std::string, std::size_t> index;
  for (const auto& s : r.scores) {
    auto [it, fresh] = index.emplace(s.ability.driver_id, out.size());
    if (fresh) out.push_back({s.ability.driver_id, s.dataset, {}, {}, Sociality::kUnclassified});
    if (!s.available || s.ability.criterion != Rationality::kComprehensive) continue;
    auto& d = out[it->second];
    (s.ability.game_type == GameType::kNonCooperative ? d.nc_score : d.c_score) = s.ability.score;
  }
  for (auto& d : out) d.sociality = classify_sociality(d.nc_score, d.c_score, r.sociality_threshold);
  return out;
}

namespace detail {

inline nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const GroupSummary& g) {
  return {{"n", g.n}, {"mean", number_or_null(g.mean)}, {"sd", number_or_null(g.sd)},
          {"se", number_or_null(g.se)}};
}

inline nlohmann::json to_json(const TTest& t) {
  return {{"t", number_or_null(t.t)}, {"df", number_or_null(t.df)}, {"p", number_or_null(t.p)}};
}

inline nlohmann::json to_json(const GroupComparison& c) {
  return {{"a", to_json(c.a)},
          {"b", to_json(c.b)},
          {"pooled", to_json(c.pooled)},
          {"welch", to_json(c.welch)},
          {"degenerate", c.degenerate}};
}

inline std::vector<std::string> datasets_of(const EvaluationReport& r) {
  std::set<std::string> s;
  for (const auto& x : r.scores) s.insert(x.dataset);
  for (const auto& x : r.pet) s.insert(x.dataset);
  return {s.begin(), s.end()};
}

inline std::vector<double> scores_where(const EvaluationReport& r, const std::string& dataset,
                                        Rationality c, GameType g) {
  std::vector<double> v;
  for (const auto& s : r.scores)
    if (s.available && s.dataset == dataset && s.ability.criterion == c &&
        s.ability.game_type == g)
      v.push_back(s.ability.score);
  return v;
}

inline std::vector<double> pet_where(const EvaluationReport& r, const std::string& dataset) {
  std::vector<double> v;
  for (const auto& p : r.pet)
    if (p.pet && p.dataset == dataset) v.push_back(*p.pet);
  return v;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace detail

inline constexpr const char* kScoresHeader =
    "scenario_id,dataset,driver_id,role,criterion,game_type,available,score,level,ed,asd,sad,"
    "msd,cosine,note";

inline std::string scores_csv(const EvaluationReport& r) {
  using io::format_double;
  std::ostringstream os;
  os << kScoresHeader << '\n';
  for (const auto& s : r.scores) {
    const auto& a = s.ability;
    os << s.scenario_id << ',' << s.dataset << ',' << a.driver_id << ',' << to_string(s.role)
       << ',' << to_string(a.criterion) << ',' << to_string(a.game_type) << ','
       << (s.available ? 1 : 0) << ',';
    if (s.available) {
      os << format_double(a.score) << ',' << to_string(a.level) << ','
         << format_double(a.components.ed) << ',' << format_double(a.components.asd) << ','
         << format_double(a.components.sad) << ',' << format_double(a.components.msd) << ','
         << format_double(a.components.cosine);
    } else {
      os << ",,,,,,";
    }
    os << ',' << detail::csv_escape(s.note) << '\n';
  }
  return os.str();
}

inline std::string pet_csv(const EvaluationReport& r) {
  std::ostringstream os;
  os << "scenario_id,dataset,pet_s,available\n";
  for (const auto& p : r.pet)
    os << p.scenario_id << ',' << p.dataset << ',' << (p.pet ? io::format_double(*p.pet) : "")
       << ',' << (p.pet ? 1 : 0) << '\n';
  return os.str();
}

inline std::string levels_csv(const EvaluationReport& r) {
  std::map<std::tuple<std::string, std::string, std::string>, std::array<int, 5>> hist;
  for (const auto& s : r.scores) {
    if (!s.available) continue;
    auto& h = hist[{s.dataset, to_string(s.ability.criterion), to_string(s.ability.game_type)}];
    ++h[static_cast<int>(s.ability.level) - 1];
  }
  std::ostringstream os;
  os << "dataset,criterion,game_type,level,count\n";
  for (const auto& [key, h] : hist)
    for (int l = 0; l < 5; ++l)
      os << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
         << to_string(static_cast<Level>(l + 1)) << ',' << h[l] << '\n';
  return os.str();
}

inline std::string sociality_csv(const std::vector<DriverSociality>& ds) {
  std::ostringstream os;
  os << "driver_id,dataset,nc_score,c_score,sociality\n";
  for (const auto& d : ds)
    os << d.driver_id << ',' << d.dataset << ','
       << (d.nc_score ? io::format_double(*d.nc_score) : "") << ','
       << (d.c_score ? io::format_double(*d.c_score) : "") << ',' << to_string(d.sociality)
       << '\n';
  return os.str();
}

/// Score histogram per criterion and game type, bins of width 0.1 on [-1, 1].
inline std::string score_distribution_csv(const EvaluationReport& r) {
  std::ostringstream os;
  os << "criterion,game_type,bin_lo,bin_hi,count\n";
  for (Rationality c : kAllCriteria) {
    for (GameType g : kAllGameTypes) {
      std::array<int, 20> bins{};
      for (const auto& s : r.scores) {
        if (!s.available || s.ability.criterion != c || s.ability.game_type != g) continue;
        int b = std::clamp(static_cast<int>(std::floor((s.ability.score + 1.0) / 0.1)), 0, 19);
        ++bins[b];
      }
      if (std::accumulate(bins.begin(), bins.end(), 0) == 0) continue;
      for (int b = 0; b < 20; ++b)
        os << to_string(c) << ',' << to_string(g) << ',' << io::format_double(-1.0 + 0.1 * b)
           << ',' << io::format_double(-1.0 + 0.1 * (b + 1)) << ',' << bins[b] << '\n';
    }
  }
  return os.str();
}

/// PET frequency per dataset in 0.5 s bins; the last bin collects >= 10 s.
inline std::string pet_histogram_csv(const EvaluationReport& r) {
  std::ostringstream os;
  os << "dataset,bin_lo,bin_hi,count\n";
  for (const auto& d : detail::datasets_of(r)) {
    std::array<int, 21> bins{};
    for (double p : detail::pet_where(r, d)) ++bins[std::min(20, static_cast<int>(p / 0.5))];
    for (int b = 0; b < 21; ++b)
      os << d << ',' << io::format_double(0.5 * b) << ','
         << (b == 20 ? std::string("inf") : io::format_double(0.5 * (b + 1))) << ',' << bins[b]
         << '\n';
  }
  return os.str();
}

/// Aggregates, level histograms, sociality shares and t-tests. Contains no
/// timestamps; identical reports give identical text.
inline nlohmann::json summary_json(const EvaluationReport& r) {
  using nlohmann::json;
  using detail::to_json;
  json j;
  j["format"] = "interaction-eval-summary/1";
  j["run"] = r.run_info;
  std::set<std::string> scenarios;
  int unavailable = 0;
  for (const auto& s : r.scores) {
    scenarios.insert(s.scenario_id);
    unavailable += s.available ? 0 : 1;
  }
  j["counts"] = {{"scenarios", scenarios.size()},
                 {"score_records", r.scores.size()},
                 {"unavailable_records", unavailable},
                 {"rollout_timeouts", r.timeouts}};

  const auto datasets = detail::datasets_of(r);
  json agg = json::array();
  for (const auto& d : datasets)
    for (GameType g : kAllGameTypes)
      for (Rationality c : kAllCriteria) {
        auto v = detail::scores_where(r, d, c, g);
        json e = to_json(summarize(v));
        e["dataset"] = d;
        e["game_type"] = to_string(g);
        e["criterion"] = to_string(c);
        std::array<int, 5> levels{};
        for (const auto& s : r.scores)
          if (s.available && s.dataset == d && s.ability.criterion == c && s.ability.game_type == g)
            ++levels[static_cast<int>(s.ability.level) - 1];
        json lv;
        for (int l = 0; l < 5; ++l) lv[to_string(static_cast<Level>(l + 1))] = levels[l];
        e["levels"] = lv;
        agg.push_back(e);
      }
  j["aggregates"] = agg;

  const auto soc = sociality_of(r);
  json sj;
  sj["rule"] = {{"criterion", "comprehensive"},
                {"scale", "shifted score (s + 1) / 2"},
                {"threshold", r.sociality_threshold},
                {"margin", "threshold times the smaller shifted score"}};
  json per = json::object();
  for (const auto& d : datasets) {
    std::map<Sociality, int> count;
    int classified = 0;
    for (const auto& x : soc) {
      if (x.dataset != d) continue;
      ++count[x.sociality];
      if (x.sociality != Sociality::kUnclassified) ++classified;
    }
    json e;
    for (Sociality s : {Sociality::kStrongerCompetition, Sociality::kBalance,
                        Sociality::kStrongerCooperation}) {
      e["counts"][to_string(s)] = count[s];
      e["percent"][to_string(s)] =
          classified == 0 ? 0.0 : 100.0 * count[s] / static_cast<double>(classified);
    }
    e["unclassified"] = count[Sociality::kUnclassified];
    per[d] = e;
  }
  sj["datasets"] = per;
  j["sociality"] = sj;

  json pet;
  for (const auto& d : datasets) pet[d] = to_json(summarize(detail::pet_where(r, d)));
  j["pet"] = pet.is_null() ? json::object() : pet;

  json tests = json::array();
  for (std::size_t x = 0; x < datasets.size(); ++x) {
    for (std::size_t y = x + 1; y < datasets.size(); ++y) {
      auto add = [&](const std::string& metric, const std::vector<double>& a,
                     const std::vector<double>& b) {
        json t = {{"metric", metric}, {"a", datasets[x]}, {"b", datasets[y]}};
        if (a.size() < 2 || b.size() < 2) {
          t["result"] = nullptr;
        } else {
          t["result"] = to_json(compare_groups(a, b));
        }
        tests.push_back(t);
      };
      add("pet", detail::pet_where(r, datasets[x]), detail::pet_where(r, datasets[y]));
      for (GameType g : kAllGameTypes)
        add(std::string("score/comprehensive/") + to_string(g),
            detail::scores_where(r, datasets[x], Rationality::kComprehensive, g),
            detail::scores_where(r, datasets[y], Rationality::kComprehensive, g));
    }
  }
  j["t_tests"] = tests;
  j["warnings"] = r.warnings;
  return j;
}

/// Writes scores.csv, summary.json, levels.csv, pet.csv, sociality.csv and
/// the plot-data CSVs under `out_dir`, each through a temporary file.
inline void emit_report(const EvaluationReport& r, const std::filesystem::path& out_dir) {
  io::ensure_directory(out_dir);
  io::ensure_directory(out_dir / "plots");
  io::write_file_atomic(out_dir / "scores.csv", scores_csv(r));
  io::write_file_atomic(out_dir / "pet.csv", pet_csv(r));
  io::write_file_atomic(out_dir / "levels.csv", levels_csv(r));
  io::write_file_atomic(out_dir / "sociality.csv", sociality_csv(sociality_of(r)));
  io::write_file_atomic(out_dir / "summary.json", summary_json(r).dump(2) + "\n");
  io::write_file_atomic(out_dir / "plots" / "score_distribution.csv", score_distribution_csv(r));
  io::write_file_atomic(out_dir / "plots" / "pet_histogram.csv", pet_histogram_csv(r));
  if (r.calibration_trace) {
    std::ostringstream os;
    write_trace_csv(os, *r.calibration_trace);
    io::write_file_atomic(out_dir / "plots" / "calibration_trace.csv", os.str());
  }
}

// ---------------------------------------------------------------------------
// Reading results back

inline std::vector<ScoreRecord> parse_scores_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::kParse, source + ": empty file");
  const io::Header h(io::split_csv_line(line));
  const char* names[] = {"scenario_id", "dataset", "driver_id", "role", "criterion",
                         "game_type", "available", "score", "level", "ed",
                         "asd", "sad", "msd", "cosine"};
  std::map<std::string, std::size_t> col;
  for (const char* n : names) col[n] = h.require(n, source);
  const auto note_col = h.find("note");
  std::vector<ScoreRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = io::split_csv_line(line);
    const std::string where = source + " row " + std::to_string(row);
    auto get = [&](const char* n) -> const std::string& {
      std::size_t i = col.at(n);
      if (i >= f.size()) raise(ErrorKind::kParse, where + ": missing value for '" + n + "'");
      return f[i];
    };
    auto num = [&](const char* n) {
      auto v = io::parse_double(get(n));
      if (!v) raise(ErrorKind::kParse, where + ": column '" + std::string(n) + "' is not a number");
      return *v;
    };
    ScoreRecord s;
    s.scenario_id = get("scenario_id");
    s.dataset = get("dataset");
    s.ability.driver_id = get("driver_id");
    auto role = role_from_string(get("role"));
    auto crit = rationality_from_string(get("criterion"));
    auto game = game_type_from_string(get("game_type"));
    if (!role || !crit || !game) raise(ErrorKind::kParse, where + ": bad role, criterion or game_type");
    s.role = *role;
    s.ability.criterion = *crit;
    s.ability.game_type = *game;
    s.available = get("available") == "1";
    if (s.available) {
      s.ability.score = num("score");
      auto lv = level_from_string(get("level"));
      if (!lv) raise(ErrorKind::kParse, where + ": bad level");
      s.ability.level = *lv;
      s.ability.components = {num("ed"), num("asd"), num("sad"), num("msd"), num("cosine")};
    }
    if (note_col && *note_col < f.size()) s.note = f[*note_col];
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<ScoreRecord> read_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kIo, "cannot open " + path.string());
  return parse_scores_csv(in, path.string());
}

inline std::vector<PetRecord> read_pet_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::kParse, path.string() + ": empty file");
  const io::Header h(io::split_csv_line(line));
  const auto id = h.require("scenario_id", path.string());
  const auto ds = h.require("dataset", path.string());
  const auto pc = h.require("pet_s", path.string());
  std::vector<PetRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = io::split_csv_line(line);
    if (f.size() <= std::max({id, ds, pc}))
      raise(ErrorKind::kParse, path.string() + " row " + std::to_string(row) + ": too few columns");
    PetRecord p{f[id], f[ds], {}};
    if (!f[pc].empty()) {
      auto v = io::parse_double(f[pc]);
      if (!v) raise(ErrorKind::kParse, path.string() + " row " + std::to_string(row) + ": bad pet_s");
      p.pet = *v;
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<GaGeneration> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::kParse, path.string() + ": empty file");
  const io::Header h(io::split_csv_line(line));
  const auto gc = h.require("generation", path.string());
  const auto bc = h.require("best_fitness", path.string());
  const auto mc = h.require("mean_fitness", path.string());
  std::vector<GaGeneration> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = io::split_csv_line(line);
    const std::string where = path.string() + " row " + std::to_string(row);
    if (f.size() <= std::max({gc, bc, mc})) raise(ErrorKind::kParse, where + ": too few columns");
    auto g = io::parse_double(f[gc]), b = io::parse_double(f[bc]), m = io::parse_double(f[mc]);
    if (!g || !b || !m) raise(ErrorKind::kParse, where + ": not a number");
    out.push_back({static_cast<int>(*g), *b, *m});
  }
  return out;
}

/// Rebuilds a report from an output directory written by emit_report.
inline EvaluationReport read_report(const std::filesystem::path& dir) {
  EvaluationReport r;
  r.scores = read_scores_csv(dir / "scores.csv");
  if (std::filesystem::exists(dir / "pet.csv")) r.pet = read_pet_csv(dir / "pet.csv");
  if (std::filesystem::exists(dir / "summary.json")) {
    auto j = io::read_json_file(dir / "summary.json");
    if (j.contains("run")) r.run_info = j["run"];
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
    if (j.contains("counts") && j["counts"].contains("rollout_timeouts"))
      r.timeouts = j["counts"]["rollout_timeouts"].get<int>();
    if (j.contains("sociality") && j["sociality"].contains("rule"))
      r.sociality_threshold = j["sociality"]["rule"].value("threshold", kDefaultSocialityThreshold);
  }
  return r;
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_PIPELINE_EVALUATE_HPP
