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

#ifndef INTERACTION_EVAL_ESTIMATION_EKF_HPP
#define INTERACTION_EVAL_ESTIMATION_EKF_HPP

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "interaction_eval/core/types.hpp"
#include "interaction_eval/risk/risk_field.hpp"

namespace interaction_eval {

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;
using Matrix2 = Eigen::Matrix2d;

/// Control input of the unicycle model.
struct Control {
  double accel = 0.0;
  double yaw_rate = 0.0;
};

/// One step of the unicycle model. Speed is clamped at zero and the heading
/// wrapped into (-pi, pi].
inline VehicleState unicycle_step(const VehicleState& s, const Control& u, double dt) {
  if (!(dt > 0.0)) raise(ErrorKind::kInvalidInput, "dt must be positive");
  VehicleState n = s;
  n.x = s.x + s.v * std::cos(s.theta) * dt;
  n.y = s.y + s.v * std::sin(s.theta) * dt;
  n.v = std::max(0.0, s.v + u.accel * dt);
  n.theta = normalize_angle(s.theta + u.yaw_rate * dt);
  n.a = u.accel;
  n.omega = u.yaw_rate;
  n.t_index = s.t_index + 1;
  n.t = s.t + dt;
  return n;
}

/// Jacobian of the unicycle step with respect to (x, y, v, theta).
inline Matrix4 motion_jacobian(const VehicleState& s, double dt) {
  if (!(dt > 0.0)) raise(ErrorKind::kInvalidInput, "dt must be positive");
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  Matrix4 j = Matrix4::Identity();
  j(0, 2) = c * dt;
  j(0, 3) = -s.v * sn * dt;
  j(1, 2) = sn * dt;
  j(1, 3) = s.v * c * dt;
  return j;
}

struct EkfState {
  Vector4 mean = Vector4::Zero();  // x, y, v, theta
  Matrix4 covariance = Matrix4::Zero();
  Matrix4 process_noise = Vector4(0.01, 0.01, 0.1, 0.01).asDiagonal();
  Matrix2 measurement_noise = Eigen::Vector2d(0.05, 0.05).asDiagonal();

  VehicleState as_vehicle_state() const {
    VehicleState s;
    s.x = mean(0);
    s.y = mean(1);
    s.v = mean(2);
    s.theta = mean(3);
    return s;
  }

  static EkfState from(const VehicleState& s) {
    EkfState e;
    e.mean << s.x, s.y, s.v, s.theta;
    return e;
  }
};

namespace detail {

template <typename Derived>
bool symmetric_psd(const Eigen::MatrixBase<Derived>& m, double tol = 1e-9) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  using Plain = typename Derived::PlainObject;
  Plain sym = (m + m.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Plain> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace detail

inline void validate(const EkfState& e) {
  if (!detail::symmetric_psd(e.covariance))
    raise(ErrorKind::kNumerical, "state covariance is not symmetric PSD");
  if (!detail::symmetric_psd(e.process_noise))
    raise(ErrorKind::kNumerical, "process noise is not symmetric PSD");
  if (!detail::symmetric_psd(e.measurement_noise))
    raise(ErrorKind::kNumerical, "measurement noise is not symmetric PSD");
}

/// Time update: mean through the unicycle model, P <- J P J^T + Q.
inline EkfState ekf_predict(const EkfState& ekf, const Control& u, double dt) {
  validate(ekf);
  const VehicleState s = ekf.as_vehicle_state();
  const Matrix4 j = motion_jacobian(s, dt);
  const VehicleState n = unicycle_step(s, u, dt);
  EkfState out = ekf;
  out.mean << n.x, n.y, n.v, n.theta;
  Matrix4 p = j * ekf.covariance * j.transpose() + ekf.process_noise;
  out.covariance = (p + p.transpose()) / 2.0;
  return out;
}

/// Measurement update with a position observation (x, y).
inline EkfState ekf_update(const EkfState& ekf, const Point2& z) {
  validate(ekf);
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Matrix2 innovation_cov = h * ekf.covariance * h.transpose() + ekf.measurement_noise;
  Eigen::FullPivLU<Matrix2> lu(innovation_cov);
  if (!lu.isInvertible() || std::abs(innovation_cov.determinant()) < 1e-300)
    raise(ErrorKind::kNumerical, "innovation covariance is singular");
  const Eigen::Matrix<double, 4, 2> gain = ekf.covariance * h.transpose() * lu.inverse();
  EkfState out = ekf;
  Eigen::Vector2d innovation(z.x - ekf.mean(0), z.y - ekf.mean(1));
  out.mean = ekf.mean + gain * innovation;
  out.mean(3) = normalize_angle(out.mean(3));
  out.mean(2) = std::max(0.0, out.mean(2));
  // Joseph form of P - K H P; algebraically identical, keeps P PSD.
  const Matrix4 i_kh = Matrix4::Identity() - gain * h;
  Matrix4 p = i_kh * ekf.covariance * i_kh.transpose() +
              gain * ekf.measurement_noise * gain.transpose();
  out.covariance = (p + p.transpose()) / 2.0;
  return out;
}

/// Field with every dynamic source replaced by its one-step prediction.
/// Static objects are unchanged.
inline double future_risk(const Point2& probe, std::span<const RiskSource> predicted,
                          std::span<const StaticObject> statics, const RiskParams& p) {
  return instantaneous_field(probe, predicted, statics, p);
}

/// Dynamic sources now and one interval ahead, plus static objects.
struct Scene {
  std::vector<RiskSource> current;
  std::vector<RiskSource> predicted;
  std::vector<StaticObject> statics;
};

/// One-step predictions of `current` under the given controls.
inline std::vector<RiskSource> predict_sources(std::span<const RiskSource> current,
                                               std::span<const Control> controls,
                                               double dt) {
  std::vector<RiskSource> out;
  out.reserve(current.size());
  for (std::size_t i = 0; i < current.size(); ++i) {
    Control u = i < controls.size() ? controls[i] : Control{};
    EkfState e = EkfState::from(current[i].state);
    VehicleState n = ekf_predict(e, u, dt).as_vehicle_state();
    out.push_back({n, current[i].geometry});
  }
  return out;
}

/// w_now * R_now + (1 - w_now) * R_future.
inline double blend_risk(double r_now, double r_future, double w_now) {
  return w_now * r_now + (1.0 - w_now) * r_future;
}

inline double comprehensive_risk(const Point2& probe, const Scene& scene, const RiskParams& p) {
  double now = instantaneous_field(probe, scene.current, scene.statics, p);
  double fut = future_risk(probe, scene.predicted, scene.statics, p);
  return blend_risk(now, fut, p.w_now);
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_ESTIMATION_EKF_HPP
