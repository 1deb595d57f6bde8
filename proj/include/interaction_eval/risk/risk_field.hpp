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

#ifndef INTERACTION_EVAL_RISK_RISK_FIELD_HPP
#define INTERACTION_EVAL_RISK_RISK_FIELD_HPP

#include <cmath>
#include <ostream>
#include <span>
#include <vector>

#include "interaction_eval/core/types.hpp"

namespace interaction_eval {

/// Risk-field coefficients. The defaults are the calibrated vector
/// [w_now, alpha_x, alpha_y, beta_x, beta_y] = [0.3157, 0.1053, 0.4737,
/// 0.8421, 0.8947].
struct RiskParams {
  double w_now = 0.3157;
  double alpha_x = 0.1053;
  double alpha_y = 0.4737;
  double beta_x = 0.8421;
  double beta_y = 0.8947;
  /// Multiplies the speed amplification for probes behind a vehicle.
  double rear_factor = 0.5;

  friend bool operator==(const RiskParams&, const RiskParams&) = default;
};

inline void validate(const RiskParams& p) {
  if (p.alpha_x < 0 || p.alpha_y < 0 || p.beta_x < 0 || p.beta_y < 0)
    raise(ErrorKind::kInvalidInput, "risk attenuation coefficients must be non-negative");
  if (!(p.w_now >= 0.0 && p.w_now <= 1.0))
    raise(ErrorKind::kInvalidInput, "w_now must lie in [0, 1]");
  if (!(p.rear_factor >= 0.0 && p.rear_factor <= 1.0))
    raise(ErrorKind::kInvalidInput, "rear_factor must lie in [0, 1]");
}

/// A dynamic risk source: a vehicle's state and its footprint.
struct RiskSource {
  VehicleState state;
  VehicleGeometry geometry;
};

/// Decay factor for a one-sided gap: beta * max(gap, 0) / (alpha * v + 1).
inline double decay(double gap, double speed_component, double alpha, double beta) {
  return beta * std::max(gap, 0.0) / (alpha * speed_component + 1.0);
}

/// Probe offset expressed in the source's body frame (longitudinal, lateral).
inline Point2 body_frame_offset(const Point2& probe, const VehicleState& s) {
  double dx = probe.x - s.x, dy = probe.y - s.y;
  double c = std::cos(s.theta), sn = std::sin(s.theta);
  return {c * dx + sn * dy, -sn * dx + c * dy};
}

/// Longitudinal decay of the source's field at `probe`. The gap is measured
/// along the source heading from its front (or rear) boundary; speed enters
/// through |v cos(theta)|.
inline double longitudinal_decay(const Point2& probe, const RiskSource& src,
                                 const RiskParams& p) {
  double u = body_frame_offset(probe, src.state).x;
  double half = src.geometry.length / 2.0;
  double vx = std::abs(src.state.v * std::cos(src.state.theta));
  if (u >= half) return decay(u - half, vx, p.alpha_x, p.beta_x);
  if (u <= -half) return decay(-u - half, p.rear_factor * vx, p.alpha_x, p.beta_x);
  return 0.0;
}

/// Lateral decay, gap measured sideways from the source's flank.
inline double lateral_decay(const Point2& probe, const RiskSource& src,
                            const RiskParams& p) {
  double w = body_frame_offset(probe, src.state).y;
  double vy = std::abs(src.state.v * std::sin(src.state.theta));
  return decay(std::abs(w) - src.geometry.width / 2.0, vy, p.alpha_y, p.beta_y);
}

/// R = 1 / (sqrt(dx^2 + dy^2) + 1).
inline double combine_decays(double dx, double dy) {
  return 1.0 / (std::hypot(dx, dy) + 1.0);
}

inline double vehicle_risk(const Point2& probe, const RiskSource& src, const RiskParams& p) {
  return combine_decays(longitudinal_decay(probe, src, p), lateral_decay(probe, src, p));
}

inline double static_risk(const Point2& probe, const StaticObject& obj, const RiskParams& p) {
  RiskSource src{{.x = obj.x, .y = obj.y}, {obj.length, obj.width}};
  return obj.max_risk * vehicle_risk(probe, src, p);
}

/// Superposition of every dynamic and static contribution.
inline double instantaneous_field(const Point2& probe, std::span<const RiskSource> vehicles,
                                  std::span<const StaticObject> statics,
                                  const RiskParams& p) {
  double r = 0.0;
  for (const auto& v : vehicles) r += vehicle_risk(probe, v, p);
  for (const auto& o : statics) r += static_risk(probe, o, p);
  return r;
}

struct GridSpec {
  double x_min = -30, x_max = 30;
  double y_min = -30, y_max = 30;
  double step = 1.0;
};

/// Writes "x,y,risk" rows sampling the instantaneous field on a grid.
inline void export_grid_csv(std::ostream& os, const GridSpec& g,
                            std::span<const RiskSource> vehicles,
                            std::span<const StaticObject> statics, const RiskParams& p) {
  if (!(g.step > 0.0)) raise(ErrorKind::kInvalidInput, "grid step must be positive");
  os << "x,y,risk\n";
  auto nx = static_cast<long>(std::floor((g.x_max - g.x_min) / g.step + 1e-9));
  auto ny = static_cast<long>(std::floor((g.y_max - g.y_min) / g.step + 1e-9));
  for (long i = 0; i <= nx; ++i) {
    for (long j = 0; j <= ny; ++j) {
      Point2 q{g.x_min + i * g.step, g.y_min + j * g.step};
      os << q.x << ',' << q.y << ',' << instantaneous_field(q, vehicles, statics, p) << '\n';
    }
  }
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_RISK_RISK_FIELD_HPP
