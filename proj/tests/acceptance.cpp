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

// Acceptance checks. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.
//
//   acceptance <data dir> <path to ieval>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "interaction_eval/estimation/ekf.hpp"
#include "interaction_eval/pipeline/evaluate.hpp"
#include "interaction_eval/pipeline/simulate.hpp"
#include "interaction_eval/synthetic.hpp"

namespace ie = interaction_eval;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kTTol = 0.005;
constexpr double kWelchDfTol = 0.2;
constexpr double kNashDistance = 1e-6;
constexpr double kNashEps = 1e-9;
constexpr double kShapleyTol = 1e-12;
constexpr double kDominanceTol = 1e-9;
constexpr int kDilemmaBrakeRun = 20;  // steps of mutual hardest braking
constexpr double kJacobianRel = 1e-6;
constexpr double kPsdTol = 1e-9;
constexpr double kTrackingTol = 1e-3;
constexpr double kGridStep = 0.05;
constexpr int kRecoverySeedsNeeded = 9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Student and Welch t from published summary statistics.
Outcome ttest_reproduction() {
  auto c = ie::compare_groups(ie::summary_from_stats(53, 3.6906, 1.8081),
                              ie::summary_from_stats(92, 4.9913, 1.4950));
  bool ok = std::abs(c.pooled.t - -4.668) <= kTTol && c.pooled.df == 143 &&
            std::abs(c.welch.t - -4.436) <= kTTol && std::abs(c.welch.df - 92.8) <= kWelchDfTol;
  return {ok, fmt("pooled t=%.5f df=%.0f, welch t=%.5f df=%.3f", c.pooled.t, c.pooled.df,
                  c.welch.t, c.welch.df)};
}

// 2. Lemke-Howson lands in the support-enumeration set.
Outcome nash_oracle() {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0, 1);
  int bad = 0;
  double worst_dist = 0, worst_gain = 0;
  for (int t = 0; t < 200; ++t) {
    Eigen::MatrixXd a(3, 3), b(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) = u(rng), b(i, j) = u(rng);
    ie::Bimatrix g(a, b);
    auto all = ie::solve_nash_enumeration(g);
    auto lh = ie::solve_nash_lemke_howson(g).equilibrium;
    double best = 1e9;
    for (const auto& e : all) best = std::min(best, ie::strategy_distance(e, lh));
    double gain = ie::deviation_gain(g, lh.row_strategy, lh.col_strategy);
    worst_dist = std::max(worst_dist, best);
    worst_gain = std::max(worst_gain, gain);
    if (best > kNashDistance || !ie::is_equilibrium(g, lh.row_strategy, lh.col_strategy, kNashEps))
      ++bad;
  }
  return {bad == 0, fmt("%d/200 mismatches, max distance %.2e, max deviation gain %.2e", bad,
                        worst_dist, worst_gain)};
}

// 3. Shapley efficiency and symmetry.
Outcome shapley_axioms() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  double worst_eff = 0, worst_sym = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 3;
    const ie::Coalition full = (1u << n) - 1;
    std::vector<double> raw(full + 1);
    for (double& x : raw) x = u(rng);
    // Players 0 and 1 are made interchangeable.
    auto swap01 = [](ie::Coalition c) {
      ie::Coalition b0 = c & 1u, b1 = (c >> 1) & 1u;
      return (c & ~3u) | (b0 << 1) | b1;
    };
    ie::TabularGame g{n, std::vector<double>(full + 1)};
    for (ie::Coalition c = 1; c <= full; ++c) g.values[c] = 0.5 * (raw[c] + raw[swap01(c)]);
    auto phi = ie::shapley_values(n, g);
    double sum = 0;
    for (double x : phi) sum += x;
    worst_eff = std::max(worst_eff, std::abs(sum - g.values[full]));
    worst_sym = std::max(worst_sym, std::abs(phi[0] - phi[1]));
  }
  return {worst_eff <= kShapleyTol && worst_sym <= kShapleyTol,
          fmt("max |sum phi - v(N)| %.2e, max |phi_0 - phi_1| %.2e", worst_eff, worst_sym)};
}

// 4. The cooperative joint action is never worse in total than any NE.
Outcome cooperative_dominance() {
  ie::GameConfig cfg;
  ie::Encounter enc;
  enc.paths[0] = ie::Path({{-60, -60}, {60, 60}});
  enc.paths[1] = ie::Path({{60, -60}, {-60, 60}});
  enc.conflict_point = {0, 0};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(5, 60), v(2, 14);
  auto player = [&](ie::Role r) {
    ie::PlayerState p;
    p.role = r;
    p.v = v(rng);
    p.dist_to_conflict = d(rng);
    p.time_to_conflict = p.dist_to_conflict / (p.v + cfg.epsilon);
    p.action_history.dt = cfg.dt;
    return p;
  };
  int violations = 0, games = 0;
  double worst = -1e300;
  for (int t = 0; t < 100; ++t) {
    cfg.rationality = ie::kAllCriteria[t % 3];
    auto left = player(ie::Role::kLeftTurn);
    auto straight = player(ie::Role::kStraight);
    auto sp = ie::build_stage_game(left, straight, enc, cfg, {});
    auto sol = ie::solve_cooperative(sp, cfg);
    ++games;
    for (const auto& e : ie::solve_nash_enumeration(sp.payoffs)) {
      double gap = e.total_payoff() - sol.total_payoff;
      worst = std::max(worst, gap);
      if (gap > kDominanceTol) ++violations;
    }
  }
  return {violations == 0,
          fmt("%d games, %d violations, max NE total minus cooperative total %.3g", games,
              violations, worst)};
}

// 5. Dilemma case study.
Outcome dilemma(const fs::path& data) {
  auto cfg = ie::parse_simulation_config(ie::io::read_json_file(data / "synthetic/dilemma.json"));
  auto r = ie::simulate(cfg);
  const auto& nc = r.outcomes[0];
  const auto& c = r.outcomes[1];
  bool sustained = nc.longest_mutual_braking >= kDilemmaBrakeRun;
  bool resolved = !c.rollout.timed_out && c.rollout.pass_step[0] >= 0 &&
                  c.rollout.pass_step[1] >= 0 && c.rollout.pass_step[0] != c.rollout.pass_step[1];
  bool better = c.cumulative_total_payoff > nc.cumulative_total_payoff;
  return {sustained && resolved && better,
          fmt("NC braking run %d steps (timed out: %s); C pass steps %d/%d; cumulative C %.3f vs "
              "NC %.3f",
              nc.longest_mutual_braking, nc.rollout.timed_out ? "yes" : "no",
              c.rollout.pass_step[0], c.rollout.pass_step[1], c.cumulative_total_payoff,
              nc.cumulative_total_payoff)};
}

// 6. Scoring metric properties.
Outcome scoring_fuzz() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> len(1, 200);
  std::uniform_real_distribution<double> u(-3, 3);
  int bad = 0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> a(len(rng)), b(a.size());
    for (double& x : a) x = u(rng);
    for (double& x : b) x = u(rng);
    ie::ActionSequence sa{a, 0.1}, sb{b, 0.1};
    double s = ie::ability_score(sa, sb).score;
    if (!(s >= -1.0 && s <= 1.0)) ++bad;
    if (ie::ability_score(sa, sa).score != 1.0) ++bad;
    auto c = ie::morphological_components(a, b);
    if (c.sad > 0 && !(c.msd >= c.ed * (1 - 1e-12) && c.msd <= 2 * c.ed * (1 + 1e-12))) ++bad;
    if (ie::morphological_distance(a, b) != ie::morphological_distance(b, a)) ++bad;
  }
  return {bad == 0, fmt("%d property violations over 10000 pairs", bad)};
}

// 7. EKF numerics.
Outcome ekf_numerics() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-50, 50), vel(0.5, 20), th(-3, 3), acc(-3, 3),
      unit(-1, 1);
  auto state = [](double x, double y, double v, double t) {
    ie::VehicleState s;
    s.x = x, s.y = y, s.v = v, s.theta = t;
    return s;
  };
  auto vec = [](const ie::VehicleState& s) { return ie::Vector4(s.x, s.y, s.v, s.theta); };
  double worst_rel = 0;
  for (int i = 0; i < 1000; ++i) {
    auto s = state(pos(rng), pos(rng), vel(rng), th(rng));
    ie::Control u{acc(rng), 0.0};
    ie::Matrix4 num;
    const double h = 1e-5;
    for (int c = 0; c < 4; ++c) {
      ie::Vector4 lo = vec(s), hi = vec(s);
      lo(c) -= h, hi(c) += h;
      auto f = [&](const ie::Vector4& x) {
        return vec(ie::unicycle_step(state(x(0), x(1), x(2), x(3)), u, 0.1));
      };
      num.col(c) = (f(hi) - f(lo)) / (2 * h);
    }
    ie::Matrix4 an = ie::motion_jacobian(s, 0.1);
    worst_rel = std::max(worst_rel, ((an - num).array().abs() / an.array().abs().max(1.0)).maxCoeff());
  }

  double worst_eig = 1e300;
  std::normal_distribution<double> n01(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    ie::EkfState e = ie::EkfState::from(state(0, 0, 5, 0));
    ie::Matrix4 m;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) m(i, k) = n01(rng);
    e.covariance = m * m.transpose();
    for (int k = 0; k < 100; ++k) {
      if (k % 3 != 2)
        e = ie::ekf_predict(e, {unit(rng), 0.2 * unit(rng)}, 0.1);
      else
        e = ie::ekf_update(e, {e.mean(0) + unit(rng), e.mean(1) + unit(rng)});
      Eigen::SelfAdjointEigenSolver<ie::Matrix4> es(e.covariance);
      worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff());
    }
  }

  double worst_track = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ie::VehicleState truth = state(0, 0, 8 + unit(rng), unit(rng));
    ie::EkfState e = ie::EkfState::from(state(0.01 * unit(rng), 0.01 * unit(rng),
                                              truth.v + unit(rng), truth.theta + 0.2 * unit(rng)));
    e.covariance = ie::Vector4(1e-4, 1e-4, 1.0, 0.05).asDiagonal();
    e.process_noise.setZero();
    e.measurement_noise = 1e-6 * ie::Matrix2::Identity();
    double err = 0;
    for (int k = 1; k <= 20; ++k) {
      ie::Control c{0.5 * unit(rng), 0.1 * unit(rng)};
      truth = ie::unicycle_step(truth, c, 0.1);
      e = ie::ekf_update(ie::ekf_predict(e, c, 0.1), truth.position());
      err = std::hypot(e.mean(0) - truth.x, e.mean(1) - truth.y);
    }
    worst_track = std::max(worst_track, err);
  }
  return {worst_rel < kJacobianRel && worst_eig >= -kPsdTol && worst_track < kTrackingTol,
          fmt("jacobian rel err %.2e, min eigenvalue %.2e, tracking err %.2e m", worst_rel,
              worst_eig, worst_track)};
}

// 8. Risk falls with gap distance and grows with the source's speed.
Outcome risk_monotonicity() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(-20, 20), spd(0, 20), ang(-3.14159, 3.14159),
      dist(0, 30), coef(0.01, 1);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    ie::RiskParams p;
    p.alpha_x = coef(rng), p.alpha_y = coef(rng), p.beta_x = coef(rng), p.beta_y = coef(rng);
    ie::RiskSource src;
    src.state.x = pos(rng), src.state.y = pos(rng), src.state.v = spd(rng);
    src.state.theta = ang(rng);
    src.geometry = {4.0 + coef(rng), 1.6 + coef(rng)};
    double phi = ang(rng), d0 = dist(rng), d1 = d0 + dist(rng);
    ie::Point2 near{src.state.x + d0 * std::cos(phi), src.state.y + d0 * std::sin(phi)};
    ie::Point2 far{src.state.x + d1 * std::cos(phi), src.state.y + d1 * std::sin(phi)};
    if (ie::vehicle_risk(far, src, p) > ie::vehicle_risk(near, src, p)) ++bad;
    auto faster = src;
    faster.state.v += spd(rng);
    if (ie::vehicle_risk(near, faster, p) < ie::vehicle_risk(near, src, p)) ++bad;
  }
  return {bad == 0, fmt("%d violations over 1000 configurations", bad)};
}

// 9. GA recovers planted risk parameters from model-generated scenarios.
Outcome calibration_recovery() {
  ie::GameConfig gen;
  gen.m_weight = 0.2;
  gen.n_weight = 0.8;
  ie::RiskParams truth;
  truth.w_now = 0.3, truth.alpha_x = 0.1, truth.alpha_y = 0.45, truth.beta_x = 0.85,
  truth.beta_y = 0.9;
  const std::vector<ie::synthetic::EncounterSpec> specs{{"s1", 30, 30, 8, 10, {}},
                                                        {"s2", 25, 35, 7, 11, {}},
                                                        {"s3", 35, 28, 9, 9, {}},
                                                        {"s4", 20, 40, 6, 12, {}},
                                                        {"s5", 40, 25, 10, 8, {}}};
  std::vector<ie::ScenarioRecord> recs;
  for (const auto& s : specs) recs.push_back(ie::synthetic::model_generated(s, gen, truth));
  const auto want = ie::to_vector(truth);
  int recovered = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ie::GaConfig ga;  // population 20, 50 generations, 10-bit genes
    ga.seed = seed;
    auto r = ie::ga_calibrate(recs, ga, gen);
    auto got = ie::to_vector(r.params);
    bool ok = true;
    for (int k = 0; k < ie::kCalibratedParams; ++k)
      ok = ok && std::abs(got[k] - want[k]) <= kGridStep + 1e-9;
    recovered += ok;
    per_seed += fmt(" [%.2f %.2f %.2f %.2f %.2f F=%.3g]", got[0], got[1], got[2], got[3], got[4],
                    r.objective);
  }
  return {recovered >= kRecoverySeedsNeeded,
          fmt("%d/10 seeds within one grid step;", recovered) + per_seed};
}

int run(const std::string& cmd) {
  int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. Two evaluate runs agree byte for byte and scores.csv round-trips.
Outcome pipeline_determinism(const fs::path& data, const std::string& ieval) {
  const fs::path tmp = fs::temp_directory_path() / "ieval_acceptance";
  fs::remove_all(tmp);
  const std::string manifest = (data / "synthetic/manifest.json").string();
  int c1 = run(ieval + " evaluate " + manifest + " --seed 3 --threads 1 --out " +
               (tmp / "a").string());
  int c2 = run(ieval + " evaluate " + manifest + " --seed 3 --threads 4 --out " +
               (tmp / "b").string());
  // Exit 4 only flags rollout timeouts; the report is still written.
  if ((c1 != 0 && c1 != 4) || (c2 != 0 && c2 != 4))
    return {false, fmt("evaluate exited with %d and %d", c1, c2)};
  const std::string s1 = slurp(tmp / "a/summary.json"), s2 = slurp(tmp / "b/summary.json");
  bool same_summary = !s1.empty() && s1 == s2;
  bool same_scores = slurp(tmp / "a/scores.csv") == slurp(tmp / "b/scores.csv");

  // Re-read the emitted scores and compare with an in-process evaluation.
  auto recs = ie::io::load_manifest(manifest);
  auto expected = ie::make_report(ie::evaluate_all(recs.scenarios, {}, {}, ie::kDefaultPetRadius, 1));
  auto back = ie::read_scores_csv(tmp / "a/scores.csv");
  int mismatched = 0;
  if (back.size() != expected.scores.size()) {
    mismatched = -1;
  } else {
    for (std::size_t i = 0; i < back.size(); ++i) {
      const auto& x = back[i];
      const auto& y = expected.scores[i];
      if (x.available != y.available || x.ability.driver_id != y.ability.driver_id ||
          (x.available && (x.ability.score != y.ability.score ||
                           x.ability.components.ed != y.ability.components.ed ||
                           x.ability.components.msd != y.ability.components.msd ||
                           x.ability.components.cosine != y.ability.components.cosine)))
        ++mismatched;
    }
  }
  bool reemit = ie::scores_csv(ie::read_report(tmp / "a")) == slurp(tmp / "a/scores.csv");
  fs::remove_all(tmp);
  return {same_summary && same_scores && mismatched == 0 && reemit,
          fmt("summary identical: %s, scores identical: %s, %zu records re-read, %d mismatched, "
              "re-emit identical: %s",
              same_summary ? "yes" : "no", same_scores ? "yes" : "no", back.size(), mismatched,
              reemit ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: acceptance <data dir> <ieval>\n");
    return 2;
  }
  const fs::path data = argv[1];
  const std::string ieval = argv[2];

  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"t-test reproduction", 1, ttest_reproduction},
      {"Nash oracle equivalence", 10, nash_oracle},
      {"Shapley efficiency and symmetry", 1, shapley_axioms},
      {"cooperative dominance", 10, cooperative_dominance},
      {"dilemma case study", 5, [&] { return dilemma(data); }},
      {"scoring metric properties", 5, scoring_fuzz},
      {"EKF numerics", 5, ekf_numerics},
      {"risk-field monotonicity", 2, risk_monotonicity},
      {"calibration synthetic recovery", 300, calibration_recovery},
      {"pipeline determinism and round-trip", 60, [&] { return pipeline_determinism(data, ieval); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt(" (over the %.0f s limit)", c.limit_s);
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
