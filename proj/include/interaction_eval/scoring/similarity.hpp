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

#ifndef INTERACTION_EVAL_SCORING_SIMILARITY_HPP
#define INTERACTION_EVAL_SCORING_SIMILARITY_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "interaction_eval/core/types.hpp"
#include "interaction_eval/game/config.hpp"

namespace interaction_eval {

enum class Level { kI = 1, kII, kIII, kIV, kV };

inline const char* to_string(Level l) {
  switch (l) {
    case Level::kI: return "I";
    case Level::kII: return "II";
    case Level::kIII: return "III";
    case Level::kIV: return "IV";
    case Level::kV: return "V";
  }
  return "?";
}

inline std::optional<Level> level_from_string(const std::string& s) {
  for (Level l : {Level::kI, Level::kII, Level::kIII, Level::kIV, Level::kV})
    if (s == to_string(l)) return l;
  return std::nullopt;
}

struct ScoreComponents {
  double ed = 0.0;
  double asd = 0.0;
  double sad = 0.0;
  double msd = 0.0;
  double cosine = 0.0;
};

struct AbilityScore {
  std::string driver_id;
  Rationality criterion = Rationality::kComprehensive;
  GameType game_type = GameType::kNonCooperative;
  double score = 0.0;
  Level level = Level::kIII;
  ScoreComponents components;
};

namespace detail {
inline void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    raise(ErrorKind::kAlignment, "sequence lengths differ: " + std::to_string(a.size()) +
                                     " vs " + std::to_string(b.size()));
}
}  // namespace detail

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  detail::require_same_length(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

/// D_MSD = D_ED * (2 - ASD / SAD); zero when the sequences coincide.
inline ScoreComponents morphological_components(std::span<const double> a,
                                                std::span<const double> b) {
  detail::require_same_length(a, b);
  ScoreComponents c;
  double signed_sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    signed_sum += a[k] - b[k];
    c.sad += std::abs(a[k] - b[k]);
  }
  c.asd = std::abs(signed_sum);
  c.ed = euclidean_distance(a, b);
  c.msd = c.sad == 0.0 ? 0.0 : c.ed * (2.0 - c.asd / c.sad);
  return c;
}

inline double morphological_distance(std::span<const double> a, std::span<const double> b) {
  return morphological_components(a, b).msd;
}

/// Cosine of the angle between the sequences. Two zero vectors count as
/// identical (1); exactly one zero vector gives 0.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  detail::require_same_length(a, b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  // rounding in the norms can leave identical inputs a few ulps short of 1
  if (std::equal(a.begin(), a.end(), b.begin())) return 1.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

/// Pads the shorter sequence with trailing zeros to the longer length.
inline std::pair<ActionSequence, ActionSequence> pad_align(const ActionSequence& a,
                                                           const ActionSequence& b) {
  if (a.empty() || b.empty()) raise(ErrorKind::kAlignment, "cannot align an empty sequence");
  if (std::abs(a.dt - b.dt) > 1e-9) raise(ErrorKind::kAlignment, "sampling intervals differ");
  std::pair out{a, b};
  const std::size_t n = std::max(a.size(), b.size());
  out.first.accelerations.resize(n, 0.0);
  out.second.accelerations.resize(n, 0.0);
  return out;
}

/// Bands of width 0.4 on [-1, 1]; level I is the best.
inline Level score_to_level(double s) {
  if (!(s >= -1.0 - 1e-12 && s <= 1.0 + 1e-12))
    raise(ErrorKind::kInvalidInput, "score outside [-1, 1]: " + std::to_string(s));
  if (s >= 0.6) return Level::kI;
  if (s >= 0.2) return Level::kII;
  if (s >= -0.2) return Level::kIII;
  if (s >= -0.6) return Level::kIV;
  return Level::kV;
}

/// S = Co / (1 + D_MSD) between a driver's real accelerations and the
/// rational benchmark. Both sequences must already be aligned.
inline AbilityScore ability_score(const ActionSequence& real, const ActionSequence& rational) {
  if (real.empty() || rational.empty())
    raise(ErrorKind::kInvalidInput, "ability score needs non-empty sequences");
  AbilityScore s;
  s.components = morphological_components(real.accelerations, rational.accelerations);
  s.components.cosine = cosine_similarity(real.accelerations, rational.accelerations);
  s.score = s.components.cosine / (1.0 + s.components.msd);
  s.level = score_to_level(s.score);
  return s;
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_SCORING_SIMILARITY_HPP
