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

#ifndef INTERACTION_EVAL_CORE_TYPES_HPP
#define INTERACTION_EVAL_CORE_TYPES_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace interaction_eval {

/// Error categories. Each maps onto a CLI exit code.
enum class ErrorKind {
  kInvalidScenario,
  kNoConflict,
  kNumerical,
  kAlignment,
  kInvalidInput,
  kInvalidGame,
  kParse,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Kinematic state of one vehicle at one sample. `t` carries the sample
/// time in seconds so that non-uniform recordings can be resampled.
struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double theta = 0.0;
  double a = 0.0;
  double omega = 0.0;
  int t_index = 0;
  double t = 0.0;

  Point2 position() const { return {x, y}; }

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct VehicleGeometry {
  double length = 4.8;
  double width = 1.9;
};

inline void validate(const VehicleGeometry& g) {
  if (!(g.length > 0.0) || !(g.width > 0.0))
    raise(ErrorKind::kInvalidScenario, "vehicle geometry must be positive");
}

/// A fixed object (lane line, obstacle) treated as a zero-speed risk source.
struct StaticObject {
  double x = 0.0;
  double y = 0.0;
  double max_risk = 1.0;
  double length = 0.0;
  double width = 0.0;
};

inline constexpr double kLaneLineMaxRisk = 0.4;
inline constexpr double kObstacleMaxRisk = 1.0;

inline void validate(const StaticObject& o) {
  if (!(o.max_risk >= 0.0 && o.max_risk <= 1.0))
    raise(ErrorKind::kInvalidScenario, "static object max_risk outside [0, 1]");
  if (o.length < 0.0 || o.width < 0.0)
    raise(ErrorKind::kInvalidScenario, "static object extent is negative");
}

enum class Role { kLeftTurn = 0, kStraight = 1 };

inline const char* to_string(Role r) {
  return r == Role::kLeftTurn ? "left_turn" : "straight";
}

inline std::optional<Role> role_from_string(const std::string& s) {
  if (s == "left_turn") return Role::kLeftTurn;
  if (s == "straight") return Role::kStraight;
  return std::nullopt;
}

using Polyline = std::vector<Point2>;

/// One two-vehicle encounter. Index 0 is the left-turner, index 1 the
/// straight driver; see Role.
struct ScenarioRecord {
  std::string scenario_id;
  std::string dataset;
  std::array<std::vector<VehicleState>, 2> trajectories;
  std::array<VehicleGeometry, 2> geometry;
  /// Optional explicit reference paths. Empty means the path is the
  /// polyline of trajectory positions.
  std::array<Polyline, 2> reference_paths;
  std::vector<StaticObject> static_objects;
  Point2 conflict_point;
  std::array<double, 2> dist_to_conflict{0.0, 0.0};
  double dt = 0.1;

  const std::vector<VehicleState>& trajectory(Role r) const {
    return trajectories[static_cast<int>(r)];
  }
};

/// Acceleration sequence of one driver, m/s^2 per sample.
struct ActionSequence {
  std::vector<double> accelerations;
  double dt = 0.1;

  std::size_t size() const { return accelerations.size(); }
  bool empty() const { return accelerations.empty(); }
};

inline void validate(const ActionSequence& s) {
  if (s.accelerations.empty())
    raise(ErrorKind::kInvalidInput, "action sequence is empty");
  for (double a : s.accelerations)
    if (!std::isfinite(a))
      raise(ErrorKind::kInvalidInput, "action sequence has non-finite value");
}

inline void validate(const ScenarioRecord& s) {
  if (!(s.dt > 0.0)) raise(ErrorKind::kInvalidScenario, "dt must be positive");
  for (int i = 0; i < 2; ++i) {
    const auto& traj = s.trajectories[i];
    if (traj.empty())
      raise(ErrorKind::kInvalidScenario,
            s.scenario_id + ": empty " + to_string(static_cast<Role>(i)) +
                " trajectory");
    validate(s.geometry[i]);
    if (s.dist_to_conflict[i] < 0.0)
      raise(ErrorKind::kInvalidScenario, "negative distance to conflict");
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto& st = traj[k];
      if (st.v < 0.0 || st.t_index < 0)
        raise(ErrorKind::kInvalidScenario,
              s.scenario_id + ": negative speed or time index");
      if (k > 0 && traj[k].t_index != traj[k - 1].t_index + 1)
        raise(ErrorKind::kInvalidScenario,
              s.scenario_id + ": trajectory not uniformly sampled");
    }
  }
  if (s.trajectories[0].front().t_index != s.trajectories[1].front().t_index)
    raise(ErrorKind::kInvalidScenario,
          s.scenario_id + ": trajectories not time-aligned");
  for (const auto& o : s.static_objects) validate(o);
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_CORE_TYPES_HPP
