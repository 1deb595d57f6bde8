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

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "interaction_eval/pipeline/evaluate.hpp"
#include "interaction_eval/pipeline/simulate.hpp"
#include "interaction_eval/synthetic.hpp"

namespace ie = interaction_eval;
namespace fs = std::filesystem;

namespace {

std::string two_vehicle_csv(const std::string& header, double dt, int n) {
  // Left turner heads north on x = 1.75, straight vehicle heads west on y = 1.75.
  std::ostringstream os;
  os.precision(17);
  os << header << '\n';
  for (int k = 0; k < n; ++k)
    os << "e1,left_turn," << k * dt << ",1.75," << -20 + 8 * k * dt << ",8,1.5707963267948966,4.8,1.9\n";
  for (int k = 0; k < n; ++k)
    os << "e1,straight," << k * dt << ',' << 20 - 10 * k * dt << ",1.75,10,3.141592653589793,4.8,1.9\n";
  return os.str();
}

const char* kHeader = "scenario_id,vehicle_role,t,x,y,v,theta,length,width";

ie::GameConfig generating_config() {
  ie::GameConfig c;
  c.m_weight = 0.2;
  c.n_weight = 0.8;
  return c;
}

ie::ScenarioRecord generated(const std::string& id, double ld, double sd) {
  ie::synthetic::EncounterSpec spec;
  spec.id = id;
  spec.left_dist = ld;
  spec.straight_dist = sd;
  auto rec = ie::synthetic::model_generated(spec, generating_config(), ie::RiskParams{});
  rec.dataset = "gen";
  return rec;
}

// A moves east along y = 0, B moves north along x = 0, both at 5 m/s;
// B starts `delay` seconds later, so the PET is delay - 0.8 s at radius 2.
ie::ScenarioRecord crossing(double delay) {
  ie::ScenarioRecord s;
  s.scenario_id = "pet";
  s.dt = 0.1;
  s.conflict_point = {0, 0};
  for (int k = 0; k <= 200; ++k) {
    ie::VehicleState a, b;
    a.t = b.t = 0.1 * k;
    a.x = -10 + 5 * a.t;
    b.y = -10 + 5 * std::max(0.0, b.t - delay);
    s.trajectories[0].push_back(a);
    s.trajectories[1].push_back(b);
  }
  return s;
}

int run(const std::string& args) {
  const std::string cmd = std::string(IEVAL_BINARY) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ieval_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Ingest, WellFormedFile) {
  std::istringstream in(two_vehicle_csv(kHeader, 0.1, 40));
  auto r = ie::io::parse_trajectory_csv(in, "mem");
  ASSERT_EQ(r.scenarios.size(), 1u);
  const auto& s = r.scenarios[0];
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(s.trajectories[0].size(), 40u);
  EXPECT_NEAR(s.conflict_point.x, 1.75, 1e-9);
  EXPECT_NEAR(s.conflict_point.y, 1.75, 1e-9);
  EXPECT_NEAR(s.dist_to_conflict[0], 21.75, 1e-9);
  EXPECT_NEAR(s.dist_to_conflict[1], 18.25, 1e-9);
  EXPECT_NEAR(s.trajectories[1][3].a, 0.0, 1e-9);
}

TEST(Ingest, MissingColumnNamed) {
  std::istringstream in(
      two_vehicle_csv("scenario_id,vehicle_role,t,x,y,v,heading,length,width", 0.1, 5));
  try {
    ie::io::parse_trajectory_csv(in, "mem");
    FAIL() << "expected a parse error";
  } catch (const ie::Error& e) {
    EXPECT_EQ(e.kind(), ie::ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
  }
}

TEST(Ingest, NineHertzResampledWithWarning) {
  std::istringstream in(two_vehicle_csv(kHeader, 1.0 / 9.0, 36));
  auto r = ie::io::parse_trajectory_csv(in, "mem");
  ASSERT_EQ(r.scenarios.size(), 1u);
  EXPECT_FALSE(r.warnings.empty());
  const auto& tr = r.scenarios[0].trajectories[0];
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_NEAR(tr[k].t, 0.1 * k, 1e-9);
    EXPECT_NEAR(tr[k].y, -20 + 8 * tr[k].t, 1e-9);
  }
}

TEST(Ingest, RejectsBadRows) {
  std::string csv = two_vehicle_csv(kHeader, 0.1, 5);
  csv += "e1,bicycle,9,0,0,1,0,1,1\n";
  std::istringstream in(csv);
  EXPECT_THROW(ie::io::parse_trajectory_csv(in, "mem"), ie::Error);
  std::istringstream lone("scenario_id,vehicle_role,t,x,y,v,theta,length,width\n"
                          "e2,left_turn,0,0,0,1,0,4,2\n");
  EXPECT_THROW(ie::io::parse_trajectory_csv(lone, "mem"), ie::Error);
}

TEST(EvaluateScenario, GeneratingModelScoresOne) {
  auto rec = generated("g1", 30, 30);
  auto ev = ie::evaluate_scenario(rec, generating_config(), ie::RiskParams{});
  ASSERT_EQ(ev.scores.size(), 12u);
  int checked = 0;
  for (const auto& s : ev.scores) {
    if (s.ability.game_type == ie::GameType::kNonCooperative &&
        s.ability.criterion == generating_config().rationality) {
      ASSERT_TRUE(s.available);
      EXPECT_EQ(s.ability.score, 1.0);
      EXPECT_EQ(s.ability.level, ie::Level::kI);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 2);
}

TEST(EvaluateScenario, NegatedDriversScoreBelowZero) {
  auto rec = generated("g2", 30, 30);
  for (auto& tr : rec.trajectories)
    for (auto& st : tr) st.a = -st.a;
  auto ev = ie::evaluate_scenario(rec, generating_config(), ie::RiskParams{});
  for (const auto& s : ev.scores) {
    if (s.ability.game_type == ie::GameType::kNonCooperative &&
        s.ability.criterion == generating_config().rationality && s.ability.components.sad > 0) {
      EXPECT_LT(s.ability.score, 0.0);
    }
  }
}

TEST(EvaluateAll, ThreadCountDoesNotChangeResults) {
  std::vector<ie::ScenarioRecord> recs{generated("a", 30, 30), generated("b", 25, 35),
                                       generated("c", 35, 28)};
  auto one = ie::evaluate_all(recs, generating_config(), {}, 2.0, 1);
  auto many = ie::evaluate_all(recs, generating_config(), {}, 2.0, 3);
  EXPECT_EQ(ie::scores_csv(ie::make_report(one)), ie::scores_csv(ie::make_report(many)));
}

TEST(Sociality, Examples) {
  EXPECT_EQ(ie::classify_sociality(0.40, 0.50), ie::Sociality::kStrongerCooperation);
  EXPECT_EQ(ie::classify_sociality(0.50, 0.40), ie::Sociality::kStrongerCompetition);
  EXPECT_EQ(ie::classify_sociality(0.3, 0.3), ie::Sociality::kBalance);
  EXPECT_EQ(ie::classify_sociality(std::nullopt, 0.3), ie::Sociality::kUnclassified);
  EXPECT_EQ(ie::classify_sociality(-1.0, -1.0), ie::Sociality::kBalance);
}

TEST(Sociality, PercentagesPartition) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  ie::EvaluationReport r;
  for (int d = 0; d < 60; ++d) {
    for (ie::GameType g : ie::kAllGameTypes) {
      ie::ScoreRecord s;
      s.scenario_id = "s" + std::to_string(d);
      s.dataset = d % 2 ? "x" : "y";
      s.ability.driver_id = ie::driver_id(s.scenario_id, ie::Role::kLeftTurn);
      s.ability.criterion = ie::Rationality::kComprehensive;
      s.ability.game_type = g;
      s.ability.score = u(rng);
      s.ability.level = ie::score_to_level(s.ability.score);
      s.available = d % 7 != 0;
      r.scores.push_back(s);
    }
  }
  auto j = ie::summary_json(r);
  for (const auto& [name, e] : j["sociality"]["datasets"].items()) {
    double total = 0;
    int counted = 0;
    for (const auto& [k, v] : e["percent"].items()) total += v.get<double>();
    for (const auto& [k, v] : e["counts"].items()) counted += v.get<int>();
    EXPECT_NEAR(total, 100.0, 1e-9) << name;
    EXPECT_EQ(counted + e["unclassified"].get<int>(), 30) << name;
  }
}

TEST(Pet, Examples) {
  EXPECT_DOUBLE_EQ(ie::pet_from_occupancy({10.0, 12.0}, {14.0, 15.0}), 2.0);
  EXPECT_DOUBLE_EQ(ie::pet_from_occupancy({14.0, 15.0}, {10.0, 12.0}), 2.0);
  EXPECT_EQ(ie::pet_from_occupancy({10.0, 12.0}, {11.0, 13.0}), 0.0);
  EXPECT_NEAR(ie::pet_of_event(crossing(3.3)), 2.5, 1e-9);
  EXPECT_EQ(ie::pet_of_event(crossing(0.0)), 0.0);
  auto miss = crossing(1.0);
  for (auto& st : miss.trajectories[1]) st.x = 50;
  EXPECT_THROW(ie::pet_of_event(miss), ie::Error);
}

TEST(Pet, ConstructedDatasetMean) {
  const std::vector<double> pets{1.2, 2.5, 3.6906, 4.8812, 6.1812};
  double mean = 0;
  for (double p : pets) mean += ie::pet_of_event(crossing(p + 0.8)) / pets.size();
  EXPECT_NEAR(mean, 3.6906, 1e-6);
}

TEST(CompareGroups, PublishedSummaryStats) {
  auto c = ie::compare_groups(ie::summary_from_stats(53, 3.6906, 1.8081),
                              ie::summary_from_stats(92, 4.9913, 1.4950));
  EXPECT_NEAR(c.pooled.t, -4.668, 0.005);
  EXPECT_EQ(c.pooled.df, 143);
  EXPECT_NEAR(c.welch.t, -4.436, 0.005);
  EXPECT_NEAR(c.welch.df, 92.8, 0.2);
  EXPECT_LT(c.pooled.p, 1e-4);
}

TEST(CompareGroups, IdenticalAndAntisymmetric) {
  std::vector<double> a{1, 2, 3, 4}, b{2, 2.5, 5, 7, 1};
  auto same = ie::compare_groups(a, a);
  EXPECT_EQ(same.pooled.t, 0.0);
  EXPECT_NEAR(same.pooled.p, 1.0, 1e-12);
  auto ab = ie::compare_groups(a, b), ba = ie::compare_groups(b, a);
  EXPECT_DOUBLE_EQ(ab.pooled.t, -ba.pooled.t);
  EXPECT_DOUBLE_EQ(ab.welch.t, -ba.welch.t);
  EXPECT_DOUBLE_EQ(ab.welch.p, ba.welch.p);
  std::vector<double> k1{2, 2}, k2{3, 3, 3};
  EXPECT_TRUE(ie::compare_groups(k1, k2).degenerate);
  EXPECT_THROW(ie::compare_groups(std::vector<double>{1}, b), ie::Error);
}

TEST(CompareGroups, MatchesReferenceFormula) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0, 1);
  std::uniform_int_distribution<int> len(2, 40);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(len(rng)), b(len(rng));
    double shift = g(rng);
    for (double& x : a) x = g(rng) * 2;
    for (double& x : b) x = g(rng) + shift;
    // Textbook forms from raw sums.
    auto stats = [](const std::vector<double>& x) {
      double s = 0, s2 = 0;
      for (double v : x) s += v, s2 += v * v;
      double n = x.size(), m = s / n;
      return std::array<double, 3>{n, m, (s2 - n * m * m) / (n - 1)};
    };
    auto [n1, m1, v1] = stats(a);
    auto [n2, m2, v2] = stats(b);
    double sp = ((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2);
    double tp = (m1 - m2) / std::sqrt(sp / n1 + sp / n2);
    double tw = (m1 - m2) / std::sqrt(v1 / n1 + v2 / n2);
    double dfw = std::pow(v1 / n1 + v2 / n2, 2) /
                 (std::pow(v1 / n1, 2) / (n1 - 1) + std::pow(v2 / n2, 2) / (n2 - 1));
    auto c = ie::compare_groups(a, b);
    EXPECT_NEAR(c.pooled.t, tp, 1e-6 * std::max(1.0, std::abs(tp)));
    EXPECT_NEAR(c.welch.t, tw, 1e-6 * std::max(1.0, std::abs(tw)));
    EXPECT_NEAR(c.welch.df, dfw, 1e-6 * dfw);
  }
}

TEST(Report, EmptyReportGivesHeadersOnly) {
  auto dir = scratch("empty");
  ie::emit_report(ie::EvaluationReport{}, dir);
  for (auto f : {"scores.csv", "pet.csv", "levels.csv", "sociality.csv",
                 "plots/score_distribution.csv", "plots/pet_histogram.csv"}) {
    std::string text = slurp(dir / f);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1) << f;
  }
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
}

TEST(Report, RoundTripIsExact) {
  std::vector<ie::ScenarioRecord> recs{generated("a", 30, 30), generated("b", 25, 35)};
  auto rep = ie::make_report(ie::evaluate_all(recs, generating_config(), {}, 2.0, 1));
  auto dir = scratch("roundtrip");
  ie::emit_report(rep, dir);
  std::string text = slurp(dir / "scores.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 24);
  auto back = ie::read_scores_csv(dir / "scores.csv");
  ASSERT_EQ(back.size(), rep.scores.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].available, rep.scores[i].available);
    if (!back[i].available) continue;
    EXPECT_EQ(back[i].ability.score, rep.scores[i].ability.score);
    EXPECT_EQ(back[i].ability.components.msd, rep.scores[i].ability.components.msd);
    EXPECT_EQ(back[i].ability.components.cosine, rep.scores[i].ability.components.cosine);
  }
  auto again = ie::read_report(dir);
  EXPECT_EQ(ie::summary_json(again).dump(), ie::summary_json(rep).dump());
}

TEST(Report, UnwritableDirectory) {
  auto dir = scratch("blocked");
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(ie::emit_report(ie::EvaluationReport{}, dir / "file" / "sub"), ie::Error);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(ie::io::parse_game_config(nlohmann::json{{"m_wieght", 0.5}}), ie::Error);
  EXPECT_THROW(ie::io::parse_risk_params(nlohmann::json{{"gamma", 1}}), ie::Error);
  EXPECT_THROW(ie::parse_simulation_config(nlohmann::json{{"scenario", {{"lanes", 2}}}}),
               ie::Error);
  auto c = ie::io::parse_game_config(nlohmann::json{{"max_steps", 50}});
  EXPECT_EQ(c.max_steps, 50);
}

TEST(Cli, ExitCodes) {
  const std::string data = IEVAL_DATA_DIR;
  EXPECT_EQ(run("ttest 53,3.6906,1.8081 92,4.9913,1.4950"), 0);
  EXPECT_EQ(run("evaluate /nonexistent/manifest.json"), 2);
  auto dir = scratch("cli");
  std::ofstream(dir / "bad.json") << "{\"game\": {\"bogus\": 1}}";
  EXPECT_EQ(run("simulate " + (dir / "bad.json").string()), 2);
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_EQ(run("simulate " + (dir / "broken.json").string()), 2);
  EXPECT_EQ(run("simulate " + data + "/synthetic/dilemma.json --out " + (dir / "sim.json").string()),
            4);
  EXPECT_TRUE(fs::exists(dir / "sim.json"));
  EXPECT_NE(run("no-such-command"), 0);
}
