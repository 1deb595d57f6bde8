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

// ieval: command-line front end of the interaction evaluation pipeline.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "interaction_eval/calibration/calibration.hpp"
#include "interaction_eval/pipeline/evaluate.hpp"
#include "interaction_eval/pipeline/io.hpp"
#include "interaction_eval/pipeline/simulate.hpp"
#include "interaction_eval/pipeline/statistics.hpp"
#include "interaction_eval/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace interaction_eval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitTimeout = 4;

int exit_code_for(ErrorKind k) {
  return k == ErrorKind::kNumerical ? kExitNumerical : kExitInput;
}

void print_warnings(const std::vector<std::string>& w, bool verbose) {
  if (w.empty()) return;
  if (verbose) {
    for (const auto& m : w) std::cerr << "warning: " << m << '\n';
  } else {
    std::cerr << w.size() << " warning(s); rerun with --verbose to list them\n";
  }
}

io::RunConfig run_config(const std::string& path) {
  return path.empty() ? io::RunConfig{} : io::load_run_config(path);
}

// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& path, const std::string& out, double dt, bool verbose) {
  io::IngestResult r = io::load_scenarios(path, dt);
  print_warnings(r.warnings, verbose);
  if (!out.empty()) {
    std::ostringstream os;
    io::write_trajectory_csv(os, r.scenarios);
    io::write_file_atomic(out, os.str());
  }
  json j = json::array();
  for (const auto& s : r.scenarios)
    j.push_back({{"scenario_id", s.scenario_id},
                 {"dataset", s.dataset},
                 {"samples", {s.trajectories[0].size(), s.trajectories[1].size()}},
                 {"conflict_point", {s.conflict_point.x, s.conflict_point.y}},
                 {"dist_to_conflict", {s.dist_to_conflict[0], s.dist_to_conflict[1]}}});
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_calibrate(const std::string& manifest, const std::string& config,
                  std::optional<std::uint64_t> seed, const std::string& out, bool verbose) {
  io::RunConfig cfg = run_config(config);
  if (seed) cfg.ga.seed = *seed;
  io::IngestResult data = io::load_scenarios(manifest, cfg.game.dt);
  print_warnings(data.warnings, verbose);
  CalibrationResult res = ga_calibrate(data.scenarios, cfg.ga, cfg.game, {}, cfg.risk);
  ObjectiveStats stats;
  calibration_objective(res.params, data.scenarios, cfg.game, &stats);
  print_warnings(stats.warnings, verbose);

  json j;
  j["risk"] = io::to_json(res.params);
  j["objective"] = detail::number_or_null(res.objective);
  j["best_fitness"] = detail::number_or_null(res.best_fitness);
  j["ga"] = io::to_json(cfg.ga);
  j["scenarios_used"] = stats.scenarios_used;
  j["scenarios_skipped"] = stats.scenarios_skipped;
  if (!out.empty()) {
    io::ensure_directory(out);
    io::write_file_atomic(fs::path(out) / "calibration.json", j.dump(2) + "\n");
    std::ostringstream os;
    write_trace_csv(os, res.trace);
    io::write_file_atomic(fs::path(out) / "calibration_trace.csv", os.str());
  }
  std::cout << j.dump(2) << '\n';
  if (!std::isfinite(res.objective)) {
    std::cerr << "error: every rollout timed out\n";
    return kExitTimeout;
  }
  return stats.scenarios_skipped > 0 ? kExitTimeout : kExitOk;
}

struct EvaluateArgs {
  std::string manifest;
  std::string config;
  std::string out = "results";
  std::string game_type = "all";
  std::string criterion = "all";
  std::string trace;
  bool pet_baseline = false;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool verbose = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
  io::RunConfig cfg = run_config(a.config);
  if (a.pet_baseline) cfg.game.safety_metric = SafetyMetric::kPet;
  std::optional<GameType> only_game;
  std::optional<Rationality> only_criterion;
  if (a.game_type != "all") {
    only_game = game_type_from_string(a.game_type);
    if (!only_game) raise(ErrorKind::kParse, "unknown game type '" + a.game_type + "'");
  }
  if (a.criterion != "all") {
    only_criterion = rationality_from_string(a.criterion);
    if (!only_criterion) raise(ErrorKind::kParse, "unknown criterion '" + a.criterion + "'");
  }

  io::IngestResult data = io::load_scenarios(a.manifest, cfg.game.dt);
  auto evals = evaluate_all(data.scenarios, cfg.game, cfg.risk, cfg.pet_radius, a.threads);
  EvaluationReport report = make_report(std::move(evals));
  if (only_game || only_criterion) {
    std::erase_if(report.scores, [&](const ScoreRecord& s) {
      return (only_game && s.ability.game_type != *only_game) ||
             (only_criterion && s.ability.criterion != *only_criterion);
    });
  }
  report.warnings.insert(report.warnings.begin(), data.warnings.begin(), data.warnings.end());
  report.sociality_threshold = cfg.sociality_threshold;
  report.run_info = {{"input", fs::path(a.manifest).filename().string()},
                     {"seed", a.seed},
                     {"game_type", a.game_type},
                     {"criterion", a.criterion},
                     {"pet_baseline", a.pet_baseline},
                     {"pet_radius", cfg.pet_radius},
                     {"game", io::to_json(cfg.game)},
                     {"risk", io::to_json(cfg.risk)}};
  if (!a.trace.empty()) report.calibration_trace = read_trace_csv(a.trace);
  emit_report(report, a.out);
  print_warnings(report.warnings, a.verbose);
  std::cout << "wrote " << report.scores.size() << " score records for "
            << data.scenarios.size() << " scenarios to " << a.out << '\n';
  if (report.timeouts > 0) {
    std::cerr << report.timeouts << " rollout(s) timed out; their scores are unavailable\n";
    return kExitTimeout;
  }
  return kExitOk;
}

int cmd_report(const std::string& dir) {
  EvaluationReport r = read_report(dir);
  if (fs::exists(fs::path(dir) / "plots" / "calibration_trace.csv"))
    r.calibration_trace = read_trace_csv(fs::path(dir) / "plots" / "calibration_trace.csv");
  emit_report(r, dir);
  std::cout << summary_json(r).dump(2) << '\n';
  return r.timeouts > 0 ? kExitTimeout : kExitOk;
}

int cmd_simulate(const std::string& path, const std::string& out) {
  SimulationConfig c = parse_simulation_config(io::read_json_file(path));
  SimulationResult r = simulate(c);
  json j = to_json(r);
  j["description"] = c.description;
  if (!out.empty()) io::write_file_atomic(out, j.dump(2) + "\n");
  std::cout << j.dump(2) << '\n';
  const bool timed_out = r.outcomes[0].rollout.timed_out || r.outcomes[1].rollout.timed_out;
  return timed_out ? kExitTimeout : kExitOk;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b) {
  EvaluationReport a = read_report(dir_a), b = read_report(dir_b);
  json j;
  j["a"] = dir_a;
  j["b"] = dir_b;
  auto add = [&](const std::string& metric, std::vector<double> xa, std::vector<double> xb) {
    json t = {{"metric", metric}};
    if (xa.size() < 2 || xb.size() < 2)
      t["result"] = nullptr;
    else
      t["result"] = detail::to_json(compare_groups(xa, xb));
    j["t_tests"].push_back(t);
  };
  auto pets = [](const EvaluationReport& r) {
    std::vector<double> v;
    for (const auto& p : r.pet)
      if (p.pet) v.push_back(*p.pet);
    return v;
  };
  auto scores = [](const EvaluationReport& r, Rationality c, GameType g) {
    std::vector<double> v;
    for (const auto& s : r.scores)
      if (s.available && s.ability.criterion == c && s.ability.game_type == g)
        v.push_back(s.ability.score);
    return v;
  };
  add("pet", pets(a), pets(b));
  for (GameType g : kAllGameTypes)
    for (Rationality c : kAllCriteria)
      add(std::string("score/") + to_string(c) + "/" + to_string(g), scores(a, c, g),
          scores(b, c, g));
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

std::optional<GroupSummary> parse_stats(const std::string& s) {
  // n,mean,sd
  auto f = io::split_csv_line(s);
  if (f.size() != 3) return std::nullopt;
  auto n = io::parse_double(f[0]), m = io::parse_double(f[1]), sd = io::parse_double(f[2]);
  if (!n || !m || !sd || *n < 0 || *n != std::floor(*n)) return std::nullopt;
  return summary_from_stats(static_cast<std::size_t>(*n), *m, *sd);
}

int cmd_ttest(const std::string& a, const std::string& b) {
  auto ga = parse_stats(a), gb = parse_stats(b);
  if (!ga || !gb) raise(ErrorKind::kParse, "group statistics must be given as n,mean,sd");
  std::cout << detail::to_json(compare_groups(*ga, *gb)).dump(2) << '\n';
  return kExitOk;
}

// Bundled synthetic data: two datasets of human-like encounters that differ
// in acceleration noise, plus the dilemma case study.
int cmd_synth(const std::string& out_dir, std::uint64_t seed, int per_dataset) {
  const fs::path dir(out_dir);
  io::ensure_directory(dir);
  const GameConfig cfg;
  const RiskParams params;
  const synthetic::Layout layout;
  const Polyline left = synthetic::left_turn_polyline(layout);
  const Polyline straight = synthetic::straight_polyline(layout);
  auto polyline_json = [](const Polyline& p) {
    json a = json::array();
    for (const auto& q : p) a.push_back({q.x, q.y});
    return a;
  };

  struct Dataset {
    const char* name;
    double noise;
  };
  const Dataset sets[] = {{"calm", 0.15}, {"busy", 0.45}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(18.0, 40.0), v_left(5.0, 9.0),
      v_straight(7.0, 12.0);
  json manifest = {{"dataset", "synthetic"},
                   {"description", "Synthetic unprotected left-turn encounters"},
                   {"scenarios", json::array()}};
  int count = 0;
  for (const auto& d : sets) {
    std::vector<ScenarioRecord> recs;
    for (int i = 0; i < per_dataset; ++i) {
      synthetic::EncounterSpec spec;
      spec.id = std::string(d.name) + "_" + (i < 9 ? "0" : "") + std::to_string(i + 1);
      spec.left_dist = dist(rng);
      spec.straight_dist = dist(rng);
      spec.left_speed = v_left(rng);
      spec.straight_speed = v_straight(rng);
      const std::uint64_t s = rng();
      ScenarioRecord rec = synthetic::human_like(spec, cfg, params, s, d.noise, layout);
      rec.dataset = d.name;
      recs.push_back(std::move(rec));
    }
    const std::string file = std::string(d.name) + ".csv";
    std::ostringstream os;
    io::write_trajectory_csv(os, recs);
    io::write_file_atomic(dir / file, os.str());
    manifest["scenarios"].push_back(
        {{"file", file},
         {"dataset", d.name},
         {"reference_paths", {{"left_turn", polyline_json(left)}, {"straight", polyline_json(straight)}}}});
    count += static_cast<int>(recs.size());
  }
  io::write_file_atomic(dir / "manifest.json", manifest.dump(1) + "\n");

  GameConfig dilemma_game;
  dilemma_game.m_weight = 0.1;
  dilemma_game.n_weight = 0.9;
  json dilemma = {
      {"description",
       "Safety-minded drivers: the non-cooperative game stalls in mutual braking, the "
       "cooperative one settles the pass order"},
      {"scenario",
       {{"id", "dilemma"}, {"left_dist", 20.0}, {"straight_dist", 4.0}, {"left_speed", 4.0},
        {"straight_speed", 1.0}}},
      {"game", {{"m_weight", dilemma_game.m_weight}, {"n_weight", dilemma_game.n_weight}}}};
  io::write_file_atomic(dir / "dilemma.json", dilemma.dump(2) + "\n");
  std::cout << "wrote " << count << " scenarios to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interaction ability evaluation for unprotected left turns"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "List every warning");

  std::string path, out, config;
  double dt = kDefaultDt;
  auto* ingest = app.add_subcommand("ingest", "Validate a trajectory CSV or manifest");
  ingest->add_option("path", path, "CSV file or manifest")->required();
  ingest->add_option("--out", out, "Write the normalized trajectories here");
  ingest->add_option("--dt", dt, "Target sample period (s)")->check(CLI::PositiveNumber);

  std::optional<std::uint64_t> cal_seed;
  auto* calibrate = app.add_subcommand("calibrate", "Fit risk-field parameters with the GA");
  calibrate->add_option("manifest", path, "Manifest or CSV")->required();
  calibrate->add_option("--seed", cal_seed, "GA seed");
  calibrate->add_option("--config", config, "JSON run configuration");
  calibrate->add_option("--out", out, "Output directory");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score drivers against rational rollouts");
  evaluate->add_option("manifest", ev.manifest, "Manifest or CSV")->required();
  evaluate->add_option("--game-type", ev.game_type, "non_cooperative, cooperative or all");
  evaluate->add_option("--criterion", ev.criterion, "safety, efficiency, comprehensive or all");
  evaluate->add_flag("--pet-baseline", ev.pet_baseline, "Use PET instead of the risk field");
  evaluate->add_option("--seed", ev.seed, "Recorded in the run metadata");
  evaluate->add_option("--config", ev.config, "JSON run configuration");
  evaluate->add_option("--out", ev.out, "Output directory");
  evaluate->add_option("--trace", ev.trace, "Calibration trace CSV to pass through");
  evaluate->add_option("--threads", ev.threads, "Worker threads, 0 for all cores");

  auto* report = app.add_subcommand("report", "Rebuild summaries from a results directory");
  report->add_option("results", path, "Results directory")->required();

  auto* sim = app.add_subcommand("simulate", "Rational-vs-rational case study");
  sim->add_option("config", path, "Simulation JSON")->required();
  sim->add_option("--out", out, "Write the result JSON here");

  std::string dir_b;
  auto* compare = app.add_subcommand("compare", "t-tests between two results directories");
  compare->add_option("results_a", path, "First results directory")->required();
  compare->add_option("results_b", dir_b, "Second results directory")->required();

  std::string stats_a, stats_b;
  auto* ttest = app.add_subcommand("ttest", "t-tests from group summary statistics");
  ttest->add_option("a", stats_a, "n,mean,sd")->required();
  ttest->add_option("b", stats_b, "n,mean,sd")->required();

  std::uint64_t synth_seed = 7;
  int per_dataset = 12;
  auto* synth = app.add_subcommand("synth", "Generate the synthetic example data");
  synth->add_option("out", path, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--count", per_dataset, "Scenarios per dataset")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }
  ev.verbose = verbose;

  try {
    if (*ingest) return cmd_ingest(path, out, dt, verbose);
    if (*calibrate) return cmd_calibrate(path, config, cal_seed, out, verbose);
    if (*evaluate) return cmd_evaluate(ev);
    if (*report) return cmd_report(path);
    if (*sim) return cmd_simulate(path, out);
    if (*compare) return cmd_compare(path, dir_b);
    if (*ttest) return cmd_ttest(stats_a, stats_b);
    if (*synth) return cmd_synth(path, synth_seed, per_dataset);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
