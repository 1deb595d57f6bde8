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

#ifndef INTERACTION_EVAL_GAME_STAGE_GAME_HPP
#define INTERACTION_EVAL_GAME_STAGE_GAME_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "interaction_eval/core/genetic.hpp"
#include "interaction_eval/core/trajectory.hpp"
#include "interaction_eval/estimation/ekf.hpp"
#include "interaction_eval/game/bimatrix.hpp"
#include "interaction_eval/game/config.hpp"
#include "interaction_eval/game/shapley.hpp"
#include "interaction_eval/risk/risk_field.hpp"

namespace interaction_eval {

/// Longitudinal progress of one player toward the conflict point.
struct PlayerState {
  Role role = Role::kLeftTurn;
  double v = 0.0;
  double s_traveled = 0.0;
  double dist_to_conflict = 0.0;
  /// (L - s) / (v + eps) after the latest step.
  double time_to_conflict = 0.0;
  ActionSequence action_history;
  bool passed_conflict = false;
};

/// Advances one player by one interval under `accel`.
inline PlayerState kinematics_step(const PlayerState& p, double accel, const GameConfig& cfg) {
  PlayerState n = p;
  n.v = std::clamp(p.v + accel * cfg.dt, 0.0, cfg.v_max);
  n.s_traveled = p.s_traveled + n.v * cfg.dt;
  n.time_to_conflict = (p.dist_to_conflict - n.s_traveled) / (n.v + cfg.epsilon);
  n.passed_conflict = p.passed_conflict || n.s_traveled >= p.dist_to_conflict;
  return n;
}

/// Static geometry of a two-player encounter: each player's path (with the
/// arc length of its first sample), footprint and the fixed objects.
struct Encounter {
  std::array<Path, 2> paths;
  std::array<double, 2> path_offsets{0.0, 0.0};
  std::array<VehicleGeometry, 2> geometry;
  std::vector<StaticObject> statics;
  Point2 conflict_point;

  Path::Pose pose(int player, double s) const {
    return paths[player].at(path_offsets[player] + s);
  }

  static Encounter from(const ScenarioRecord& rec) {
    Encounter e;
    for (int i = 0; i < 2; ++i) {
      e.paths[i] = reference_path(rec, static_cast<Role>(i));
      e.path_offsets[i] =
          rec.reference_paths[i].empty()
              ? 0.0
              : e.paths[i].project(rec.trajectories[i].front().position()).arc_length;
      e.geometry[i] = rec.geometry[i];
    }
    e.statics = rec.static_objects;
    e.conflict_point = rec.conflict_point;
    return e;
  }
};

inline double payoff_safety(double r_all) { return 1.0 - r_all; }

inline double payoff_efficiency(double v, const GameConfig& cfg) { return v / cfg.v_max; }

inline double payoff_comprehensive(double efficiency, double r_all, const GameConfig& cfg) {
  return cfg.m_weight * efficiency + cfg.n_weight * payoff_safety(r_all);
}

/// |dis_i / (v_i + eps) - dis_o / (v_o + eps)| with dis the remaining
/// distance to the conflict point after the step.
inline double pet_value(const PlayerState& p, const PlayerState& other, const GameConfig& cfg) {
  double dis_i = std::max(p.dist_to_conflict - p.s_traveled, 0.0);
  double dis_o = std::max(other.dist_to_conflict - other.s_traveled, 0.0);
  return std::abs(dis_i / (p.v + cfg.epsilon) - dis_o / (other.v + cfg.epsilon));
}

inline double normalized_pet(double pet, const GameConfig& cfg) {
  return std::min(pet, cfg.pet_cap) / cfg.pet_cap;
}

/// m * E + n * PET/PET_cap (PET saturated at the cap).
inline double payoff_pet(const PlayerState& p, const PlayerState& other, const GameConfig& cfg) {
  return cfg.m_weight * payoff_efficiency(p.v, cfg) +
         cfg.n_weight * normalized_pet(pet_value(p, other, cfg), cfg);
}

struct PayoffTerms {
  double efficiency = 0.0;
  double risk = 0.0;     // comprehensive risk R_all
  double safety = 0.0;   // 1 - R_all, or normalized PET
  double value = 0.0;    // payoff under the configured rationality
};

/// Risk perceived by `player` at its post-step position from the other
/// player (current and one-step-predicted) and the static objects.
inline double perceived_risk(int player, const std::array<PlayerState, 2>& next,
                             const std::array<double, 2>& accel, const Encounter& enc,
                             const GameConfig& cfg, const RiskParams& params) {
  const int other = 1 - player;
  const Point2 probe = enc.pose(player, next[player].s_traveled).position;
  const auto pose_o = enc.pose(other, next[other].s_traveled);
  VehicleState st;
  st.x = pose_o.position.x;
  st.y = pose_o.position.y;
  st.v = next[other].v;
  st.theta = pose_o.heading;
  const double ahead = enc.pose(other, next[other].s_traveled + next[other].v * cfg.dt).heading;
  Control u{accel[other], normalize_angle(ahead - pose_o.heading) / cfg.dt};
  // Mean of the EKF time update; the covariance does not enter the field.
  const RiskSource now{st, enc.geometry[other]};
  const RiskSource fut{unicycle_step(st, u, cfg.dt), enc.geometry[other]};
  const double r_now = instantaneous_field(probe, std::span(&now, 1), enc.statics, params);
  const double r_fut = future_risk(probe, std::span(&fut, 1), enc.statics, params);
  return blend_risk(r_now, r_fut, params.w_now);
}

inline PayoffTerms player_payoff(int player, const std::array<PlayerState, 2>& next,
                                 const std::array<double, 2>& accel, const Encounter& enc,
                                 const GameConfig& cfg, const RiskParams& params) {
  PayoffTerms t;
  t.efficiency = payoff_efficiency(next[player].v, cfg);
  if (cfg.safety_metric == SafetyMetric::kRiskField) {
    t.risk = perceived_risk(player, next, accel, enc, cfg, params);
    t.safety = payoff_safety(t.risk);
  } else {
    t.safety = normalized_pet(pet_value(next[player], next[1 - player], cfg), cfg);
  }
  switch (cfg.rationality) {
    case Rationality::kSafetyFirst: t.value = t.safety; break;
    case Rationality::kEfficiencyFirst: t.value = t.efficiency; break;
    case Rationality::kComprehensive:
      t.value = cfg.m_weight * t.efficiency + cfg.n_weight * t.safety;
      break;
  }
  return t;
}

/// Joint-action payoff table. `payoffs` carries the infeasible marker;
/// `raw` keeps the unconstrained payoffs of every cell.
struct StagePayoffs {
  Bimatrix payoffs;
  Bimatrix raw;
  std::vector<std::vector<bool>> feasible;
  std::vector<std::vector<std::array<PlayerState, 2>>> next;
  std::vector<std::vector<double>> time_gap;
  bool all_infeasible = false;

  std::size_t size() const { return feasible.size(); }
};

inline double collision_avoid_time(const std::array<PlayerState, 2>& next,
                                   const Encounter& enc, const GameConfig& cfg) {
  if (!cfg.geometric_t_avoid) return cfg.t_avoid;
  // The follower is the later arrival.
  int follower = next[0].time_to_conflict >= next[1].time_to_conflict ? 0 : 1;
  return (enc.geometry[1 - follower].length + cfg.conflict_zone_width) /
         (next[follower].v + cfg.epsilon);
}

/// Every joint action (row = left-turner, column = straight driver),
/// payoffs per the configured rationality. A cell is infeasible when it
/// breaks the speed limit or leaves less than t_avoid between the arrival
/// times. Both players approach when the game is built, so the gap is
/// checked even for a cell in which one of them crosses the point.
inline StagePayoffs build_stage_game(const PlayerState& left, const PlayerState& straight,
                                     const Encounter& enc, const GameConfig& cfg,
                                     const RiskParams& params) {
  const auto k = static_cast<Eigen::Index>(cfg.strategy_accels.size());
  StagePayoffs sp;
  sp.payoffs = Bimatrix(Eigen::MatrixXd(k, k), Eigen::MatrixXd(k, k));
  sp.raw = sp.payoffs;
  sp.feasible.assign(k, std::vector<bool>(k, true));
  sp.next.assign(k, std::vector<std::array<PlayerState, 2>>(k));
  sp.time_gap.assign(k, std::vector<double>(k, 0.0));
  bool any = false;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const std::array<double, 2> accel{cfg.strategy_accels[i], cfg.strategy_accels[j]};
      std::array<PlayerState, 2> nx{kinematics_step(left, accel[0], cfg),
                                    kinematics_step(straight, accel[1], cfg)};
      bool ok = true;
      for (int p = 0; p < 2; ++p) {
        const PlayerState& prev = p == 0 ? left : straight;
        if (std::abs(accel[p]) > cfg.a_max) ok = false;
        if (prev.v + accel[p] * cfg.dt > cfg.v_max + 1e-12) ok = false;
      }
      const double gap = std::abs(nx[0].time_to_conflict - nx[1].time_to_conflict);
      if (gap < collision_avoid_time(nx, enc, cfg)) ok = false;
      const double u_row = player_payoff(0, nx, accel, enc, cfg, params).value;
      const double u_col = player_payoff(1, nx, accel, enc, cfg, params).value;
      sp.raw.row(i, j) = u_row;
      sp.raw.col(i, j) = u_col;
      sp.payoffs.row(i, j) = ok ? u_row : cfg.infeasible_payoff;
      sp.payoffs.col(i, j) = ok ? u_col : cfg.infeasible_payoff;
      sp.feasible[i][j] = ok;
      sp.next[i][j] = nx;
      sp.time_gap[i][j] = gap;
      any = any || ok;
    }
  }
  sp.all_infeasible = !any;
  return sp;
}

/// Index of the strategy with the lowest acceleration.
inline int hardest_brake(const GameConfig& cfg) {
  return static_cast<int>(std::min_element(cfg.strategy_accels.begin(),
                                           cfg.strategy_accels.end()) -
                          cfg.strategy_accels.begin());
}

struct CooperativeSolution {
  int left_action = 0;
  int straight_action = 0;
  double total_payoff = 0.0;
  std::array<double, 2> shapley{0.0, 0.0};
  std::array<double, 2> coalition_values{0.0, 0.0};  // v({L}), v({S})
  bool superadditive = true;
  bool fallback = false;
};

/// Best pure payoff a player can guarantee over feasible cells.
inline double security_level(const StagePayoffs& sp, int player, double infeasible) {
  const std::size_t k = sp.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t own = 0; own < k; ++own) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t opp = 0; opp < k; ++opp) {
      std::size_t i = player == 0 ? own : opp;
      std::size_t j = player == 0 ? opp : own;
      if (!sp.feasible[i][j]) continue;
      worst = std::min(worst, player == 0 ? sp.raw.row(i, j) : sp.raw.col(i, j));
    }
    if (std::isfinite(worst)) best = std::max(best, worst);
  }
  return std::isfinite(best) ? best : infeasible;
}

/// Feasible joint action with the largest coalition payoff. Ties go to the
/// lower summed acceleration, then to the lower left-turn acceleration.
/// Individual credit is assigned by Shapley value with singleton coalitions
/// valued at their security level.
inline CooperativeSolution solve_cooperative(const StagePayoffs& sp, const GameConfig& cfg) {
  CooperativeSolution sol;
  const std::size_t k = sp.size();
  if (sp.all_infeasible) {
    sol.fallback = true;
    sol.left_action = sol.straight_action = hardest_brake(cfg);
    sol.total_payoff =
        sp.raw.row(sol.left_action, sol.straight_action) + sp.raw.col(sol.left_action, sol.straight_action);
    sol.shapley = {sp.raw.row(sol.left_action, sol.straight_action),
                   sp.raw.col(sol.left_action, sol.straight_action)};
    return sol;
  }
  bool have = false;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!sp.feasible[i][j]) continue;
      double total = sp.raw.row(i, j) + sp.raw.col(i, j);
      double asum = cfg.strategy_accels[i] + cfg.strategy_accels[j];
      double best_sum = have ? cfg.strategy_accels[sol.left_action] +
                                   cfg.strategy_accels[sol.straight_action]
                             : 0.0;
      bool better = !have || total > sol.total_payoff + 1e-12 ||
                    (std::abs(total - sol.total_payoff) <= 1e-12 &&
                     (asum < best_sum ||
                      (asum == best_sum &&
                       cfg.strategy_accels[i] < cfg.strategy_accels[sol.left_action])));
      if (better) {
        have = true;
        sol.left_action = static_cast<int>(i);
        sol.straight_action = static_cast<int>(j);
        sol.total_payoff = total;
      }
    }
  }
  sol.coalition_values = {security_level(sp, 0, cfg.infeasible_payoff),
                          security_level(sp, 1, cfg.infeasible_payoff)};
  TabularGame game{2, {0.0, sol.coalition_values[0], sol.coalition_values[1], sol.total_payoff}};
  auto phi = shapley_values(2, game);
  sol.shapley = {phi[0], phi[1]};
  sol.superadditive = is_superadditive(2, game, 1e-12);
  return sol;
}

inline CooperativeSolution solve_cooperative(const PlayerState& left, const PlayerState& straight,
                                             const Encounter& enc, const GameConfig& cfg,
                                             const RiskParams& params) {
  return solve_cooperative(build_stage_game(left, straight, enc, cfg, params), cfg);
}

/// Joint payoff callback for n-player coalitions: per-player payoffs of a
/// joint action, or nullopt when the joint action is infeasible.
using JointPayoffFn =
    std::function<std::optional<std::vector<double>>(const std::vector<int>& joint)>;

struct JointSolution {
  std::vector<int> actions;
  double total = -std::numeric_limits<double>::infinity();
  std::vector<double> payoffs;
  bool found = false;
};

/// Exhaustive search over every joint action; used for two players and as
/// the reference for the genetic search.
inline JointSolution solve_joint_exhaustive(int players, int strategies, const JointPayoffFn& f) {
  JointSolution best;
  std::vector<int> joint(players, 0);
  while (true) {
    if (auto u = f(joint)) {
      double total = 0.0;
      for (double x : *u) total += x;
      if (!best.found || total > best.total + 1e-12) {
        best = {joint, total, *u, true};
      }
    }
    int p = players - 1;
    while (p >= 0 && ++joint[p] == strategies) joint[p--] = 0;
    if (p < 0) break;
  }
  return best;
}

/// Genetic search for the coalition-optimal joint action of `players`
/// players. `payoff_floor` is a lower bound on any feasible total.
inline JointSolution solve_joint_ga(int players, int strategies, const JointPayoffFn& f,
                                    const GaConfig& ga, double payoff_floor = 0.0) {
  auto to_joint = [&](const std::vector<std::uint32_t>& genes) {
    std::vector<int> joint(players);
    for (int p = 0; p < players; ++p)
      joint[p] = static_cast<int>((static_cast<std::uint64_t>(genes[p]) * strategies) >>
                                  ga.dna_size);
    return joint;
  };
  auto result = run_binary_ga(players, ga, [&](const std::vector<std::uint32_t>& genes) {
    auto u = f(to_joint(genes));
    if (!u) return 0.0;
    double total = 0.0;
    for (double x : *u) total += x;
    return total - payoff_floor + 1e-9;
  });
  JointSolution sol;
  sol.actions = to_joint(result.best_genes);
  if (auto u = f(sol.actions)) {
    sol.found = true;
    sol.payoffs = *u;
    sol.total = 0.0;
    for (double x : *u) sol.total += x;
  }
  return sol;
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_GAME_STAGE_GAME_HPP
