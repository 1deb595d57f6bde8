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

#ifndef INTERACTION_EVAL_GAME_CONFIG_HPP
#define INTERACTION_EVAL_GAME_CONFIG_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "interaction_eval/core/types.hpp"

namespace interaction_eval {

enum class GameType { kNonCooperative, kCooperative };
enum class Rationality { kSafetyFirst, kEfficiencyFirst, kComprehensive };
/// Which safety term enters the payoff: the risk field or the PET baseline.
enum class SafetyMetric { kRiskField, kPet };

inline const char* to_string(GameType g) {
  return g == GameType::kNonCooperative ? "non_cooperative" : "cooperative";
}

inline const char* to_string(Rationality r) {
  switch (r) {
    case Rationality::kSafetyFirst: return "safety";
    case Rationality::kEfficiencyFirst: return "efficiency";
    case Rationality::kComprehensive: return "comprehensive";
  }
  return "?";
}

inline const char* to_string(SafetyMetric m) {
  return m == SafetyMetric::kRiskField ? "risk_field" : "pet";
}

inline std::optional<GameType> game_type_from_string(const std::string& s) {
  if (s == "non_cooperative" || s == "nc") return GameType::kNonCooperative;
  if (s == "cooperative" || s == "c") return GameType::kCooperative;
  return std::nullopt;
}

inline std::optional<Rationality> rationality_from_string(const std::string& s) {
  if (s == "safety" || s == "safety_first") return Rationality::kSafetyFirst;
  if (s == "efficiency" || s == "efficiency_first") return Rationality::kEfficiencyFirst;
  if (s == "comprehensive") return Rationality::kComprehensive;
  return std::nullopt;
}

struct GameConfig {
  /// Accelerations of the strategies {accelerate, keep speed, decelerate}.
  std::vector<double> strategy_accels{1.5, 0.0, -1.5};
  double m_weight = 0.5;  // efficiency
  double n_weight = 0.5;  // safety
  double v_max = 15.0;
  double a_max = 3.0;
  double t_avoid = 1.5;
  double epsilon = 1e-6;
  double dt = 0.1;
  GameType game_type = GameType::kNonCooperative;
  Rationality rationality = Rationality::kComprehensive;
  SafetyMetric safety_metric = SafetyMetric::kRiskField;
  double pet_cap = 5.0;
  int max_steps = 300;
  /// When set, t_avoid = (length + conflict_zone_width) / (follower v + eps).
  bool geometric_t_avoid = false;
  double conflict_zone_width = 3.5;
  double infeasible_payoff = -1e6;
};

inline void validate(const GameConfig& c) {
  if (c.m_weight < 0 || c.n_weight < 0 || std::abs(c.m_weight + c.n_weight - 1.0) > 1e-9)
    raise(ErrorKind::kInvalidInput, "payoff weights must be non-negative and sum to one");
  if (!(c.t_avoid > 0) || !(c.v_max > 0) || !(c.a_max > 0) || !(c.dt > 0) || !(c.epsilon > 0))
    raise(ErrorKind::kInvalidInput, "t_avoid, v_max, a_max, dt and epsilon must be positive");
  if (c.strategy_accels.empty()) raise(ErrorKind::kInvalidInput, "no strategies");
  for (double a : c.strategy_accels)
    if (std::abs(a) > c.a_max) raise(ErrorKind::kInvalidInput, "strategy exceeds a_max");
  if (c.max_steps < 1) raise(ErrorKind::kInvalidInput, "max_steps must be positive");
  if (!(c.pet_cap > 0)) raise(ErrorKind::kInvalidInput, "pet_cap must be positive");
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_GAME_CONFIG_HPP
