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

#ifndef INTERACTION_EVAL_GAME_ROLLOUT_HPP
#define INTERACTION_EVAL_GAME_ROLLOUT_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "interaction_eval/game/stage_game.hpp"

namespace interaction_eval {

/// Per-step diagnostics, recorded when tracing is on.
struct StepTrace {
  int step = 0;
  std::array<int, 2> chosen{-1, -1};  // strategy index, -1 when inactive
  std::optional<Bimatrix> payoffs;
  std::vector<std::vector<bool>> feasible;
  std::optional<Equilibrium> equilibrium;
  std::optional<CooperativeSolution> cooperative;
  bool fallback = false;
};

struct RolloutResult {
  /// Realized accelerations (v' - v) / dt while each player approaches.
  std::array<ActionSequence, 2> actions;
  std::array<std::vector<int>, 2> strategies;
  /// Sum of both players' payoffs at every step.
  std::vector<double> step_total_payoff;
  std::array<bool, 2> passed{false, false};
  /// Step at which each player passed, -1 if it did not.
  std::array<int, 2> pass_step{-1, -1};
  bool timed_out = false;
  bool fallback_used = false;
  bool degenerate_seen = false;
  int steps = 0;
  /// |t_L - t_S| of the chosen cell at the last step both were approaching.
  std::optional<double> last_joint_time_gap;
  std::array<PlayerState, 2> final_players;
  std::vector<StepTrace> trace;

  double cumulative_payoff(std::size_t horizon) const {
    double s = 0.0;
    for (std::size_t k = 0; k < std::min(horizon, step_total_payoff.size()); ++k)
      s += step_total_payoff[k];
    return s;
  }
};

/// Equilibrium with the largest total expected payoff; remaining ties go to
/// the lexicographically smaller pair of realized strategy indices.
inline int realize_pure(const Eigen::VectorXd& mix, const GameConfig& cfg) {
  int best = 0;
  for (int i = 1; i < mix.size(); ++i) {
    if (mix(i) > mix(best) + 1e-9 ||
        (std::abs(mix(i) - mix(best)) <= 1e-9 &&
         cfg.strategy_accels[i] < cfg.strategy_accels[best]))
      best = i;
  }
  return best;
}

inline const Equilibrium& select_equilibrium(const std::vector<Equilibrium>& eqs,
                                             const GameConfig& cfg) {
  std::size_t best = 0;
  for (std::size_t e = 1; e < eqs.size(); ++e) {
    double a = eqs[e].total_payoff(), b = eqs[best].total_payoff();
    double tol = 1e-9 * std::max(1.0, std::abs(b));
    if (a > b + tol) {
      best = e;
    } else if (std::abs(a - b) <= tol) {
      std::pair ke{realize_pure(eqs[e].row_strategy, cfg), realize_pure(eqs[e].col_strategy, cfg)};
      std::pair kb{realize_pure(eqs[best].row_strategy, cfg),
                   realize_pure(eqs[best].col_strategy, cfg)};
      if (ke < kb) best = e;
    }
  }
  return eqs[best];
}

inline std::array<PlayerState, 2> initial_players(const ScenarioRecord& rec,
                                                  const GameConfig& cfg) {
  std::array<PlayerState, 2> p;
  for (int i = 0; i < 2; ++i) {
    p[i].role = static_cast<Role>(i);
    p[i].v = std::min(rec.trajectories[i].front().v, cfg.v_max);
    p[i].dist_to_conflict = rec.dist_to_conflict[i];
    p[i].time_to_conflict = p[i].dist_to_conflict / (p[i].v + cfg.epsilon);
    p[i].passed_conflict = rec.dist_to_conflict[i] <= 1e-9;
    p[i].action_history.dt = cfg.dt;
  }
  return p;
}

/// Game-based interaction process. At every step the stage game is rebuilt
/// from the current states and solved (Lemke-Howson for the
/// non-cooperative game, coalition optimum for the cooperative one); the
/// chosen actions are realized and appended to each player's history. A
/// player leaves the game once it passes the conflict point and coasts from
/// then on; a remaining player best-responds alone.
inline RolloutResult rollout_interaction(const Encounter& enc,
                                         std::array<PlayerState, 2> players,
                                         const GameConfig& cfg, const RiskParams& params,
                                         bool record_trace = false) {
  validate(cfg);
  RolloutResult out;
  for (int i = 0; i < 2; ++i) {
    out.actions[i].dt = cfg.dt;
    out.passed[i] = players[i].passed_conflict;
    if (out.passed[i]) out.pass_step[i] = 0;
  }
  const int k_strat = static_cast<int>(cfg.strategy_accels.size());
  const int brake = hardest_brake(cfg);

  int k = 0;
  for (; k < cfg.max_steps; ++k) {
    const bool active0 = !players[0].passed_conflict;
    const bool active1 = !players[1].passed_conflict;
    if (!active0 && !active1) break;

    StepTrace tr;
    tr.step = k;
    std::array<PlayerState, 2> next;
    std::array<int, 2> chosen{-1, -1};
    std::array<double, 2> accel{0.0, 0.0};

    if (active0 && active1) {
      StagePayoffs sp = build_stage_game(players[0], players[1], enc, cfg, params);
      if (sp.all_infeasible) {
        chosen = {brake, brake};
        out.fallback_used = tr.fallback = true;
      } else if (cfg.game_type == GameType::kNonCooperative) {
        bool degenerate = false;
        auto eqs = lemke_howson_all_labels(sp.payoffs, &degenerate);
        out.degenerate_seen = out.degenerate_seen || degenerate;
        const Equilibrium& eq = select_equilibrium(eqs, cfg);
        chosen = {realize_pure(eq.row_strategy, cfg), realize_pure(eq.col_strategy, cfg)};
        if (record_trace) tr.equilibrium = eq;
      } else {
        CooperativeSolution sol = solve_cooperative(sp, cfg);
        chosen = {sol.left_action, sol.straight_action};
        if (record_trace) tr.cooperative = sol;
      }
      next = sp.next[chosen[0]][chosen[1]];
      accel = {cfg.strategy_accels[chosen[0]], cfg.strategy_accels[chosen[1]]};
      if (!sp.all_infeasible)
        out.last_joint_time_gap = sp.time_gap[chosen[0]][chosen[1]];
      if (record_trace) {
        tr.payoffs = sp.payoffs;
        tr.feasible = sp.feasible;
      }
    } else {
      const int me = active0 ? 0 : 1;
      const int other = 1 - me;
      PlayerState coasting = kinematics_step(players[other], 0.0, cfg);
      double best_u = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < k_strat; ++s) {
        const double a = cfg.strategy_accels[s];
        if (players[me].v + a * cfg.dt > cfg.v_max + 1e-12) continue;
        std::array<PlayerState, 2> nx;
        nx[me] = kinematics_step(players[me], a, cfg);
        nx[other] = coasting;
        std::array<double, 2> ac{};
        ac[me] = a;
        double u = player_payoff(me, nx, ac, enc, cfg, params).value;
        bool better = chosen[me] < 0 || u > best_u + 1e-12 ||
                      (std::abs(u - best_u) <= 1e-12 && a < cfg.strategy_accels[chosen[me]]);
        if (better) {
          best_u = std::max(best_u, u);
          chosen[me] = s;
          next = nx;
          accel = ac;
        }
      }
      if (chosen[me] < 0) {
        chosen[me] = brake;
        next[me] = kinematics_step(players[me], cfg.strategy_accels[brake], cfg);
        next[other] = coasting;
        accel[me] = cfg.strategy_accels[brake];
      }
    }

    out.step_total_payoff.push_back(player_payoff(0, next, accel, enc, cfg, params).value +
                                    player_payoff(1, next, accel, enc, cfg, params).value);
    for (int i = 0; i < 2; ++i) {
      if (chosen[i] < 0) {
        players[i] = next[i];
        continue;
      }
      const double realized = (next[i].v - players[i].v) / cfg.dt;
      next[i].action_history = std::move(players[i].action_history);
      next[i].action_history.accelerations.push_back(realized);
      players[i] = std::move(next[i]);
      out.actions[i].accelerations.push_back(realized);
      out.strategies[i].push_back(chosen[i]);
      if (players[i].passed_conflict && !out.passed[i]) {
        out.passed[i] = true;
        out.pass_step[i] = k + 1;
      }
    }
    tr.chosen = chosen;
    if (record_trace) out.trace.push_back(std::move(tr));
  }
  out.steps = k;
  out.final_players = players;
  out.timed_out = !(players[0].passed_conflict && players[1].passed_conflict);
  return out;
}

inline RolloutResult rollout_interaction(const ScenarioRecord& rec, const GameConfig& cfg,
                                         const RiskParams& params, bool record_trace = false) {
  return rollout_interaction(Encounter::from(rec), initial_players(rec, cfg), cfg, params,
                             record_trace);
}

/// Total payoff of both players over `horizon` steps. A rollout that ends
/// early is extended with both players coasting from their final states,
/// so outcomes of different length compare on the same time span.
inline double cumulative_total_payoff(const RolloutResult& r, std::size_t horizon,
                                      const Encounter& enc, const GameConfig& cfg,
                                      const RiskParams& params) {
  double total = r.cumulative_payoff(horizon);
  std::array<PlayerState, 2> p = r.final_players;
  const std::array<double, 2> coast{0.0, 0.0};
  for (std::size_t k = r.step_total_payoff.size(); k < horizon; ++k) {
    p = {kinematics_step(p[0], 0.0, cfg), kinematics_step(p[1], 0.0, cfg)};
    total += player_payoff(0, p, coast, enc, cfg, params).value +
             player_payoff(1, p, coast, enc, cfg, params).value;
  }
  return total;
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_GAME_ROLLOUT_HPP
