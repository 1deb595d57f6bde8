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

#ifndef INTERACTION_EVAL_CALIBRATION_CALIBRATION_HPP
#define INTERACTION_EVAL_CALIBRATION_CALIBRATION_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "interaction_eval/core/genetic.hpp"
#include "interaction_eval/core/trajectory.hpp"
#include "interaction_eval/game/rollout.hpp"

namespace interaction_eval {

inline constexpr int kCalibratedParams = 5;
inline constexpr double kFitnessEpsilon = 1e-9;

/// Order: w_n, alpha_x, alpha_y, beta_x, beta_y.
using ParamVector = std::array<double, kCalibratedParams>;

inline ParamVector to_vector(const RiskParams& p) {
  return {p.w_now, p.alpha_x, p.alpha_y, p.beta_x, p.beta_y};
}

inline RiskParams from_vector(const ParamVector& v, RiskParams base = {}) {
  base.w_now = v[0];
  base.alpha_x = v[1];
  base.alpha_y = v[2];
  base.beta_x = v[3];
  base.beta_y = v[4];
  return base;
}

struct SearchBox {
  ParamVector lower{0, 0, 0, 0, 0};
  ParamVector upper{1, 1, 1, 1, 1};
};

struct ObjectiveStats {
  int scenarios_used = 0;
  int scenarios_skipped = 0;  // rollout timed out
  std::vector<std::string> warnings;
};

/// Squared difference of two sequences after trailing-zero alignment. An
/// empty sequence counts as pure coasting.
inline double aligned_squared_error(const ActionSequence& a, const ActionSequence& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double x = k < a.size() ? a.accelerations[k] : 0.0;
    double y = k < b.size() ? b.accelerations[k] : 0.0;
    s += (x - y) * (x - y);
  }
  return s;
}

/// F = 1/2 sum over roles of the mean (over scenarios) squared gap between
/// recorded and rational accelerations. Scenarios whose rollout times out
/// are skipped; F is infinite when nothing remains.
inline double calibration_objective(const RiskParams& params,
                                    std::span<const ScenarioRecord> scenarios,
                                    const GameConfig& cfg, ObjectiveStats* stats = nullptr) {
  if (scenarios.empty()) raise(ErrorKind::kInvalidInput, "calibration needs scenarios");
  std::array<double, 2> sum{0.0, 0.0};
  int used = 0;
  ObjectiveStats local;
  for (const auto& rec : scenarios) {
    RolloutResult r = rollout_interaction(rec, cfg, params);
    if (r.timed_out) {
      ++local.scenarios_skipped;
      local.warnings.push_back("rollout timed out in scenario " + rec.scenario_id);
      continue;
    }
    ++used;
    for (int i = 0; i < 2; ++i)
      sum[i] += aligned_squared_error(real_actions(rec, static_cast<Role>(i)), r.actions[i]);
  }
  local.scenarios_used = used;
  if (stats) *stats = std::move(local);
  if (used == 0) return std::numeric_limits<double>::infinity();
  return 0.5 * (sum[0] / used + sum[1] / used);
}

inline double fitness(double objective) {
  if (objective < 0) raise(ErrorKind::kInvalidInput, "objective must be non-negative");
  return 1.0 / (objective + kFitnessEpsilon);
}

/// Decodes a `bits`-bit gene into the box and snaps it to the grid.
inline double decode_gene(std::uint32_t gene, int bits, double lo, double hi, double step) {
  const double raw = lo + (hi - lo) * gene / static_cast<double>((1u << bits) - 1u);
  double snapped = lo + std::round((raw - lo) / step) * step;
  return std::clamp(snapped, lo, hi);
}

struct CalibrationResult {
  RiskParams params;
  double objective = 0.0;
  double best_fitness = 0.0;
  std::vector<GaGeneration> trace;
  /// Distinct grid points evaluated.
  std::vector<ParamVector> evaluated;
};

/// Fits the risk-field block to recorded actions with the binary GA.
/// Objective values are cached per grid point.
inline CalibrationResult ga_calibrate(std::span<const ScenarioRecord> scenarios,
                                      const GaConfig& ga, const GameConfig& game_cfg,
                                      const SearchBox& box = {}, const RiskParams& base = {}) {
  if (scenarios.empty()) raise(ErrorKind::kInvalidInput, "calibration needs scenarios");
  validate(ga);
  validate(game_cfg);
  for (int p = 0; p < kCalibratedParams; ++p)
    if (!(box.upper[p] >= box.lower[p])) raise(ErrorKind::kInvalidInput, "empty search box");

  auto decode = [&](const std::vector<std::uint32_t>& genes) {
    ParamVector v;
    for (int p = 0; p < kCalibratedParams; ++p)
      v[p] = decode_gene(genes[p], ga.dna_size, box.lower[p], box.upper[p], ga.grid_step);
    return v;
  };

  std::mutex mu;
  std::map<ParamVector, double> cache;
  auto objective_at = [&](const ParamVector& v) {
    {
      std::lock_guard lock(mu);
      if (auto it = cache.find(v); it != cache.end()) return it->second;
    }
    double f = calibration_objective(from_vector(v, base), scenarios, game_cfg);
    std::lock_guard lock(mu);
    cache.emplace(v, f);
    return f;
  };

  GaResult res = run_binary_ga(kCalibratedParams, ga, [&](const std::vector<std::uint32_t>& g) {
    double f = objective_at(decode(g));
    return std::isfinite(f) ? fitness(f) : 0.0;
  });

  CalibrationResult out;
  const ParamVector best = decode(res.best_genes);
  out.params = from_vector(best, base);
  out.objective = cache.at(best);
  out.best_fitness = res.best_fitness;
  out.trace = std::move(res.trace);
  for (const auto& [v, f] : cache) out.evaluated.push_back(v);
  return out;
}

inline void write_trace_csv(std::ostream& os, const std::vector<GaGeneration>& trace) {
  os << "generation,best_fitness,mean_fitness\n";
  char buf[96];
  for (const auto& g : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", g.generation, g.best_fitness,
                  g.mean_fitness);
    os << buf;
  }
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_CALIBRATION_CALIBRATION_HPP
