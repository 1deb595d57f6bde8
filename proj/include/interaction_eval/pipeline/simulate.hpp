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

#ifndef INTERACTION_EVAL_PIPELINE_SIMULATE_HPP
#define INTERACTION_EVAL_PIPELINE_SIMULATE_HPP

#include <algorithm>
#include <array>
#include <string>

#include "interaction_eval/pipeline/io.hpp"
#include "interaction_eval/synthetic.hpp"

namespace interaction_eval {

/// Rational-vs-rational case study on the synthetic intersection.
struct SimulationConfig {
  std::string description;
  synthetic::EncounterSpec encounter;
  GameConfig game;
  RiskParams risk;
};

inline SimulationConfig parse_simulation_config(const nlohmann::json& j) {
  using io::detail::read;
  io::detail::reject_unknown(j, {"description", "scenario", "game", "risk"}, "simulation");
  SimulationConfig c;
  read(j, "description", c.description, "simulation");
  if (j.contains("scenario")) {
    const auto& s = j["scenario"];
    const std::string w = "simulation.scenario";
    io::detail::reject_unknown(
        s, {"id", "left_dist", "straight_dist", "left_speed", "straight_speed"}, w);
    read(s, "id", c.encounter.id, w);
    read(s, "left_dist", c.encounter.left_dist, w);
    read(s, "straight_dist", c.encounter.straight_dist, w);
    read(s, "left_speed", c.encounter.left_speed, w);
    read(s, "straight_speed", c.encounter.straight_speed, w);
  }
  if (j.contains("game")) c.game = io::parse_game_config(j["game"]);
  if (j.contains("risk")) c.risk = io::parse_risk_params(j["risk"]);
  if (c.encounter.left_dist <= 0 || c.encounter.straight_dist <= 0)
    raise(ErrorKind::kInvalidInput, "simulation.scenario: distances must be positive");
  if (c.encounter.left_speed < 0 || c.encounter.straight_speed < 0)
    raise(ErrorKind::kInvalidInput, "simulation.scenario: speeds must be non-negative");
  return c;
}

struct FrameworkOutcome {
  GameType game_type = GameType::kNonCooperative;
  RolloutResult rollout;
  /// Both players' payoffs over the common horizon.
  double cumulative_total_payoff = 0.0;
  /// Longest run of steps in which both players chose the hardest braking.
  int longest_mutual_braking = 0;
};

struct SimulationResult {
  std::size_t horizon = 0;
  std::array<FrameworkOutcome, 2> outcomes;  // non-cooperative, cooperative
};

inline int longest_mutual_braking(const RolloutResult& r, const GameConfig& cfg) {
  const auto& acc = cfg.strategy_accels;
  const int brake = static_cast<int>(std::min_element(acc.begin(), acc.end()) - acc.begin());
  int best = 0, run = 0;
  for (const auto& st : r.trace) {
    const bool both = !st.fallback && st.chosen[0] == brake && st.chosen[1] == brake;
    run = both ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

/// Rolls the encounter out under both frameworks and scores each on the
/// longer of the two horizons.
inline SimulationResult simulate(const SimulationConfig& c) {
  ScenarioRecord rec = synthetic::make_skeleton(c.encounter, {}, c.game.dt);
  const Encounter enc = Encounter::from(rec);
  const auto players = initial_players(rec, c.game);
  SimulationResult out;
  for (int g = 0; g < 2; ++g) {
    GameConfig cfg = c.game;
    cfg.game_type = static_cast<GameType>(g);
    out.outcomes[g].game_type = cfg.game_type;
    out.outcomes[g].rollout = rollout_interaction(enc, players, cfg, c.risk, true);
    out.outcomes[g].longest_mutual_braking = longest_mutual_braking(out.outcomes[g].rollout, cfg);
    out.horizon = std::max<std::size_t>(out.horizon, out.outcomes[g].rollout.steps);
  }
  for (auto& o : out.outcomes) {
    GameConfig cfg = c.game;
    cfg.game_type = o.game_type;
    o.cumulative_total_payoff = cumulative_total_payoff(o.rollout, out.horizon, enc, cfg, c.risk);
  }
  return out;
}

inline nlohmann::json to_json(const SimulationResult& r) {
  nlohmann::json j;
  j["horizon_steps"] = r.horizon;
  for (const auto& o : r.outcomes) {
    const auto& ro = o.rollout;
    nlohmann::json e;
    e["steps"] = ro.steps;
    e["timed_out"] = ro.timed_out;
    e["fallback_used"] = ro.fallback_used;
    e["pass_step"] = {{"left_turn", ro.pass_step[0]}, {"straight", ro.pass_step[1]}};
    e["cumulative_total_payoff"] = o.cumulative_total_payoff;
    e["longest_mutual_braking"] = o.longest_mutual_braking;
    e["actions"] = {{"left_turn", ro.actions[0].accelerations},
                    {"straight", ro.actions[1].accelerations}};
    j[to_string(o.game_type)] = e;
  }
  return j;
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_PIPELINE_SIMULATE_HPP
