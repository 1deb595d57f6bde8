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

#ifndef INTERACTION_EVAL_SYNTHETIC_HPP
#define INTERACTION_EVAL_SYNTHETIC_HPP

// Synthetic unprotected-left-turn encounters on a four-leg intersection.
// Used for calibration self-checks, the bundled sample dataset and case
// studies.

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "interaction_eval/core/trajectory.hpp"
#include "interaction_eval/game/rollout.hpp"

namespace interaction_eval::synthetic {

/// Right-hand traffic. The left-turner comes from the south and turns west;
/// the straight driver comes from the north heading south.
struct Layout {
  double lane_offset = 1.75;
  double turn_radius = 6.75;
  double approach_length = 120.0;
  double exit_length = 60.0;
  double arc_step = 0.05;  // radians between arc vertices
};

inline Polyline left_turn_polyline(const Layout& l) {
  const double arc_start_y = -(l.turn_radius - l.lane_offset);
  const Point2 center{l.lane_offset - l.turn_radius, arc_start_y};
  Polyline p;
  p.push_back({l.lane_offset, arc_start_y - l.approach_length});
  const int n = static_cast<int>(std::ceil((std::numbers::pi / 2) / l.arc_step));
  for (int i = 0; i <= n; ++i) {
    double phi = (std::numbers::pi / 2) * i / n;
    p.push_back({center.x + l.turn_radius * std::cos(phi),
                 center.y + l.turn_radius * std::sin(phi)});
  }
  p.push_back({center.x - l.exit_length, l.lane_offset});
  return p;
}

inline Polyline straight_polyline(const Layout& l) {
  return {{-l.lane_offset, l.approach_length}, {-l.lane_offset, -l.exit_length}};
}

/// Tail of `line` starting `s0` metres along it.
inline Polyline cut_polyline(const Polyline& line, double s0) {
  Path path(line);
  Polyline out{path.at(s0).position};
  double s = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    s += distance(line[i - 1], line[i]);
    if (s > s0 + 1e-9) out.push_back(line[i]);
  }
  return out;
}

/// Initial conditions of one encounter.
struct EncounterSpec {
  std::string id = "synthetic";
  double left_dist = 30.0;      // path distance to the conflict point
  double straight_dist = 30.0;
  double left_speed = 8.0;
  double straight_speed = 10.0;
  std::vector<StaticObject> statics;
};

/// Scenario with reference paths and a single initial sample per vehicle.
inline ScenarioRecord make_skeleton(const EncounterSpec& spec, const Layout& layout = {},
                                    double dt = kDefaultDt) {
  std::array<Polyline, 2> full{left_turn_polyline(layout), straight_polyline(layout)};
  const Point2 cp = compute_conflict_point(full[0], full[1]);
  ScenarioRecord rec;
  rec.scenario_id = spec.id;
  rec.dt = dt;
  rec.static_objects = spec.statics;
  const std::array<double, 2> dist{spec.left_dist, spec.straight_dist};
  const std::array<double, 2> speed{spec.left_speed, spec.straight_speed};
  for (int i = 0; i < 2; ++i) {
    Path path(full[i]);
    double s_cp = path.project(cp).arc_length;
    if (dist[i] > s_cp) raise(ErrorKind::kInvalidInput, "start distance exceeds approach length");
    double s0 = s_cp - dist[i];
    rec.reference_paths[i] = cut_polyline(full[i], s0);
    auto pose = path.at(s0);
    VehicleState st;
    st.x = pose.position.x;
    st.y = pose.position.y;
    st.v = speed[i];
    st.theta = pose.heading;
    rec.trajectories[i] = {st};
  }
  locate_conflict(rec, cp);
  return rec;
}

/// Replaces both trajectories by integrating commanded accelerations along
/// the reference paths with the game's kinematics. Each `a` column holds
/// the realized acceleration over the following interval; commands are
/// padded with coasting so both trajectories share the same length.
inline void integrate_trajectories(ScenarioRecord& rec,
                                   const std::array<std::vector<double>, 2>& accels,
                                   double v_max, std::size_t extra_samples = 5) {
  const std::size_t n = std::max(accels[0].size(), accels[1].size()) + 1 + extra_samples;
  for (int i = 0; i < 2; ++i) {
    const Path path(rec.reference_paths[i], rec.trajectories[i].front().theta);
    const double v0 = rec.trajectories[i].front().v;
    std::vector<VehicleState> traj;
    traj.reserve(n);
    double s = 0.0, v = v0;
    for (std::size_t k = 0; k < n; ++k) {
      const double cmd = k < accels[i].size() ? accels[i][k] : 0.0;
      const double v_next = std::clamp(v + cmd * rec.dt, 0.0, v_max);
      const auto pose = path.at(s);
      VehicleState st;
      st.x = pose.position.x;
      st.y = pose.position.y;
      st.v = v;
      st.theta = pose.heading;
      st.a = (v_next - v) / rec.dt;
      st.t_index = static_cast<int>(k);
      st.t = static_cast<double>(k) * rec.dt;
      traj.push_back(st);
      v = v_next;
      s += v * rec.dt;
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
      double dth = normalize_angle(traj[k + 1].theta - traj[k].theta);
      traj[k].omega = dth / rec.dt;
    }
    rec.trajectories[i] = std::move(traj);
  }
}

/// Strategy accelerations chosen in a rollout, before speed clamping.
inline std::array<std::vector<double>, 2> commanded(const RolloutResult& r,
                                                    const GameConfig& cfg) {
  std::array<std::vector<double>, 2> out;
  for (int i = 0; i < 2; ++i)
    for (int s : r.strategies[i]) out[i].push_back(cfg.strategy_accels[s]);
  return out;
}

/// Encounter whose recorded drivers act exactly as the rational model does
/// under `cfg` and `params`.
inline ScenarioRecord model_generated(const EncounterSpec& spec, const GameConfig& cfg,
                                      const RiskParams& params, const Layout& layout = {}) {
  ScenarioRecord rec = make_skeleton(spec, layout, cfg.dt);
  RolloutResult r = rollout_interaction(rec, cfg, params);
  integrate_trajectories(rec, commanded(r, cfg), cfg.v_max);
  return rec;
}

/// Encounter with human-like drivers: each follows the rational model under
/// its own payoff weights, with Gaussian acceleration noise.
inline ScenarioRecord human_like(const EncounterSpec& spec, const GameConfig& cfg,
                                 const RiskParams& params, std::uint64_t seed,
                                 double noise_sd = 0.3, const Layout& layout = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.1, 0.9);
  std::normal_distribution<double> noise(0.0, noise_sd);
  ScenarioRecord rec = make_skeleton(spec, layout, cfg.dt);
  GameConfig driver = cfg;
  driver.m_weight = weight(rng);
  driver.n_weight = 1.0 - driver.m_weight;
  driver.game_type = (seed % 2 == 0) ? GameType::kNonCooperative : GameType::kCooperative;
  RolloutResult r = rollout_interaction(rec, driver, params);
  auto acc = commanded(r, cfg);
  for (auto& seq : acc)
    for (double& a : seq) a = std::clamp(a + noise(rng), -cfg.a_max, cfg.a_max);
  integrate_trajectories(rec, acc, cfg.v_max);
  return rec;
}

}  // namespace interaction_eval::synthetic

#endif  // INTERACTION_EVAL_SYNTHETIC_HPP
