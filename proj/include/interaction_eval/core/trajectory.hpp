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

#ifndef INTERACTION_EVAL_CORE_TRAJECTORY_HPP
#define INTERACTION_EVAL_CORE_TRAJECTORY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "interaction_eval/core/types.hpp"

namespace interaction_eval {

inline constexpr double kDefaultDt = 0.1;
inline constexpr double kDefaultConflictGate = 5.0;

/// Piecewise-linear path parameterized by arc length. Queries past the last
/// vertex extrapolate along the final segment.
class Path {
 public:
  struct Pose {
    Point2 position;
    double heading = 0.0;
  };

  Path() = default;

  explicit Path(const Polyline& points, double fallback_heading = 0.0)
      : fallback_heading_(fallback_heading) {
    for (const auto& p : points) {
      if (vertices_.empty() || distance(vertices_.back(), p) > 1e-9)
        vertices_.push_back(p);
    }
    cumulative_.reserve(vertices_.size());
    double s = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (i > 0) s += distance(vertices_[i - 1], vertices_[i]);
      cumulative_.push_back(s);
    }
  }

  static Path from_trajectory(std::span<const VehicleState> traj) {
    Polyline pts;
    pts.reserve(traj.size());
    for (const auto& st : traj) pts.push_back(st.position());
    return Path(pts, traj.empty() ? 0.0 : traj.front().theta);
  }

  bool empty() const { return vertices_.empty(); }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const Polyline& vertices() const { return vertices_; }

  Pose at(double s) const {
    if (vertices_.empty()) return {};
    if (vertices_.size() == 1) {
      return {{vertices_[0].x + s * std::cos(fallback_heading_),
               vertices_[0].y + s * std::sin(fallback_heading_)},
              normalize_angle(fallback_heading_)};
    }
    s = std::max(s, 0.0);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    std::size_t seg = std::min<std::size_t>(
        it == cumulative_.begin() ? 0 : (it - cumulative_.begin()) - 1,
        vertices_.size() - 2);
    const Point2& a = vertices_[seg];
    const Point2& b = vertices_[seg + 1];
    double seg_len = cumulative_[seg + 1] - cumulative_[seg];
    double w = (s - cumulative_[seg]) / seg_len;
    return {{a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)},
            std::atan2(b.y - a.y, b.x - a.x)};
  }

  struct Projection {
    double arc_length = 0.0;
    double distance = std::numeric_limits<double>::infinity();
  };

  /// Closest point of the path to `p`. Earliest point wins ties.
  Projection project(const Point2& p) const {
    Projection best;
    if (vertices_.size() == 1) {
      best.distance = interaction_eval::distance(vertices_[0], p);
      return best;
    }
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
      const Point2& a = vertices_[i];
      const Point2& b = vertices_[i + 1];
      double dx = b.x - a.x, dy = b.y - a.y;
      double len2 = dx * dx + dy * dy;
      double w = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
      Point2 q{a.x + w * dx, a.y + w * dy};
      double d = interaction_eval::distance(q, p);
      if (d < best.distance - 1e-12) {
        best.distance = d;
        best.arc_length = cumulative_[i] + w * std::sqrt(len2);
      }
    }
    return best;
  }

 private:
  Polyline vertices_;
  std::vector<double> cumulative_;
  double fallback_heading_ = 0.0;
};

/// Arc length from the first sample to the closest approach to
/// `conflict_point`. Throws kNoConflict when the path never comes within
/// `gate` metres.
inline double path_distance_to_conflict(std::span<const VehicleState> traj,
                                        const Point2& conflict_point,
                                        double gate = kDefaultConflictGate) {
  if (traj.empty()) raise(ErrorKind::kInvalidScenario, "empty trajectory");
  auto proj = Path::from_trajectory(traj).project(conflict_point);
  if (proj.distance > gate)
    raise(ErrorKind::kNoConflict, "trajectory passes " +
                                      std::to_string(proj.distance) +
                                      " m from the conflict point");
  return proj.arc_length;
}

inline double path_distance_to_conflict(const Path& path,
                                        const Point2& conflict_point,
                                        double gate = kDefaultConflictGate) {
  auto proj = path.project(conflict_point);
  if (proj.distance > gate)
    raise(ErrorKind::kNoConflict, "path passes " + std::to_string(proj.distance) +
                                      " m from the conflict point");
  return proj.arc_length;
}

namespace detail {

inline double cross(double ax, double ay, double bx, double by) {
  return ax * by - ay * bx;
}

/// Parameter along segment p0-p1 of the intersection with q0-q1, if any.
inline std::optional<double> segment_intersection(const Point2& p0, const Point2& p1,
                                                  const Point2& q0, const Point2& q1) {
  double rx = p1.x - p0.x, ry = p1.y - p0.y;
  double sx = q1.x - q0.x, sy = q1.y - q0.y;
  double denom = cross(rx, ry, sx, sy);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  double qpx = q0.x - p0.x, qpy = q0.y - p0.y;
  double t = cross(qpx, qpy, sx, sy) / denom;
  double u = cross(qpx, qpy, rx, ry) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

}  // namespace detail

/// First crossing of the left-turn path with the straight path, walking the
/// left-turn path from its start. Falls back to the midpoint of the closest
/// approach when the paths do not cross but pass within `gate`.
inline Point2 compute_conflict_point(const Polyline& left_turn,
                                     const Polyline& straight,
                                     double gate = kDefaultConflictGate) {
  for (std::size_t i = 0; i + 1 < left_turn.size(); ++i) {
    std::optional<double> best;
    for (std::size_t j = 0; j + 1 < straight.size(); ++j) {
      auto t = detail::segment_intersection(left_turn[i], left_turn[i + 1],
                                            straight[j], straight[j + 1]);
      if (t && (!best || *t < *best)) best = t;
    }
    if (best) {
      const Point2& a = left_turn[i];
      const Point2& b = left_turn[i + 1];
      return {a.x + *best * (b.x - a.x), a.y + *best * (b.y - a.y)};
    }
  }
  if (left_turn.empty() || straight.empty())
    raise(ErrorKind::kNoConflict, "empty path");
  // The closest approach of two polylines involves a vertex of one of them.
  double best_d = std::numeric_limits<double>::infinity();
  Point2 best_p;
  auto scan = [&](const Polyline& from, const Polyline& onto) {
    Path other(onto);
    for (const auto& p : from) {
      auto proj = other.project(p);
      if (proj.distance < best_d - 1e-12) {
        best_d = proj.distance;
        auto q = other.at(proj.arc_length).position;
        best_p = {(p.x + q.x) / 2.0, (p.y + q.y) / 2.0};
      }
    }
  };
  scan(left_turn, straight);
  scan(straight, left_turn);
  if (best_d > gate) raise(ErrorKind::kNoConflict, "paths never come within the gate");
  return best_p;
}

/// Fills `a` and `omega` by central differences of v and theta; endpoints
/// use one-sided differences.
inline void derive_rates(std::vector<VehicleState>& traj, double dt) {
  const std::size_t n = traj.size();
  if (n < 2) {
    for (auto& s : traj) s.a = s.omega = 0.0;
    return;
  }
  std::vector<double> a(n), w(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t lo = k == 0 ? 0 : k - 1;
    std::size_t hi = k + 1 == n ? k : k + 1;
    double span = static_cast<double>(hi - lo) * dt;
    a[k] = (traj[hi].v - traj[lo].v) / span;
    w[k] = normalize_angle(traj[hi].theta - traj[lo].theta) / span;
  }
  for (std::size_t k = 0; k < n; ++k) {
    traj[k].a = a[k];
    traj[k].omega = w[k];
  }
}

inline bool is_uniform(std::span<const VehicleState> traj, double dt) {
  for (std::size_t k = 1; k < traj.size(); ++k)
    if (std::abs((traj[k].t - traj[k - 1].t) - dt) > 1e-9 * std::max(1.0, dt))
      return false;
  return true;
}

/// Linear resampling of x, y, v, theta onto a uniform grid of step
/// `dt_target` starting at `t_start` (default: the first sample).
/// Accelerations and yaw rates are recomputed by finite differences. A
/// trajectory already uniform at `dt_target` with a sample at `t_start` is
/// sliced instead, keeping its recorded values.
inline std::vector<VehicleState> resample_trajectory(std::span<const VehicleState> traj,
                                                     double dt_target,
                                                     std::optional<double> t_start = {}) {
  if (traj.empty()) raise(ErrorKind::kInvalidScenario, "cannot resample an empty trajectory");
  if (!(dt_target > 0.0)) raise(ErrorKind::kInvalidInput, "dt_target must be positive");
  const double t0 = t_start.value_or(traj.front().t);
  if (t0 < traj.front().t - 1e-9 || t0 > traj.back().t + 1e-9)
    raise(ErrorKind::kInvalidInput, "resampling start outside the trajectory");
  if (is_uniform(traj, dt_target)) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
      if (std::abs(traj[k].t - t0) <= 1e-9) {
        std::vector<VehicleState> out(traj.begin() + static_cast<std::ptrdiff_t>(k), traj.end());
        for (std::size_t j = 0; j < out.size(); ++j) out[j].t_index = static_cast<int>(j);
        return out;
      }
    }
  }

  const double span = traj.back().t - t0;
  const auto n = static_cast<std::size_t>(std::floor(span / dt_target + 1e-9)) + 1;
  std::vector<VehicleState> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double t = t0 + static_cast<double>(k) * dt_target;
    while (seg + 2 < traj.size() && traj[seg + 1].t < t) ++seg;
    VehicleState s;
    if (traj.size() == 1) {
      s = traj.front();
    } else {
      const auto& p = traj[seg];
      const auto& q = traj[seg + 1];
      double w = (q.t > p.t) ? std::clamp((t - p.t) / (q.t - p.t), 0.0, 1.0) : 0.0;
      s.x = p.x + w * (q.x - p.x);
      s.y = p.y + w * (q.y - p.y);
      s.v = std::max(0.0, p.v + w * (q.v - p.v));
      s.theta = normalize_angle(p.theta + w * normalize_angle(q.theta - p.theta));
    }
    s.t = t;
    s.t_index = static_cast<int>(k);
    out.push_back(s);
  }
  derive_rates(out, dt_target);
  return out;
}

/// Index of the first sample whose travelled arc length reaches `dist`, or
/// the trajectory length when it never does.
inline std::size_t passing_index(std::span<const VehicleState> traj, double dist) {
  double s = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (k > 0) s += distance(traj[k - 1].position(), traj[k].position());
    if (s >= dist) return k;
  }
  return traj.size();
}

/// Reference path of one vehicle: the explicit path when present, else the
/// polyline of its recorded positions.
inline Path reference_path(const ScenarioRecord& s, Role r) {
  int i = static_cast<int>(r);
  const auto& traj = s.trajectories[i];
  double heading = traj.empty() ? 0.0 : traj.front().theta;
  if (!s.reference_paths[i].empty()) return Path(s.reference_paths[i], heading);
  return Path::from_trajectory(traj);
}

/// Recorded accelerations of one driver up to the sample at which it
/// reaches the conflict point. Progress is measured along the explicit
/// reference path when present, else along the recorded polyline.
inline ActionSequence real_actions(const ScenarioRecord& s, Role r) {
  const int i = static_cast<int>(r);
  const auto& traj = s.trajectories[i];
  std::size_t end = traj.size();
  if (!s.reference_paths[i].empty()) {
    Path path = reference_path(s, r);
    const double s0 = path.project(traj.front().position()).arc_length;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      if (path.project(traj[k].position()).arc_length - s0 >= s.dist_to_conflict[i]) {
        end = k;
        break;
      }
    }
  } else {
    end = passing_index(traj, s.dist_to_conflict[i]);
  }
  ActionSequence out;
  out.dt = s.dt;
  for (std::size_t k = 0; k < end; ++k) out.accelerations.push_back(traj[k].a);
  return out;
}

/// Computes the conflict point (unless `override_point` is given) and both
/// distances to it, measured along each vehicle's reference path from its
/// first sample.
inline void locate_conflict(ScenarioRecord& s,
                            std::optional<Point2> override_point = std::nullopt,
                            double gate = kDefaultConflictGate) {
  auto polyline = [&](int i) {
    if (!s.reference_paths[i].empty()) return s.reference_paths[i];
    Polyline p;
    for (const auto& st : s.trajectories[i]) p.push_back(st.position());
    return p;
  };
  s.conflict_point = override_point ? *override_point
                                    : compute_conflict_point(polyline(0), polyline(1), gate);
  for (int i = 0; i < 2; ++i) {
    Path path = reference_path(s, static_cast<Role>(i));
    // Explicit paths may begin before the first sample.
    double offset = path.project(s.trajectories[i].front().position()).arc_length;
    s.dist_to_conflict[i] =
        std::max(0.0, path_distance_to_conflict(path, s.conflict_point, gate) - offset);
  }
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_CORE_TRAJECTORY_HPP
