// Copyright 2026 The topt Authors
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

#include "topt/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topt {

namespace {

// Keeps fallback controls finite when a live interval is one-sided.
constexpr double kControlGuard = 1e12;

double bounded(double u) {
  return std::clamp(u, -kControlGuard, kControlGuard);
}

}  // namespace

TrackingGains TrackingGains::critically_damped(int joint_count, double omega) {
  if (joint_count < 1 || !(omega > 0.0)) {
    throw std::invalid_argument("gains need joint_count >= 1 and omega > 0");
  }
  TrackingGains g;
  g.kp = Eigen::VectorXd::Constant(joint_count, omega * omega);
  g.kd = Eigen::VectorXd::Constant(joint_count, 2.0 * omega);
  return g;
}

void TrackingGains::validate(int joint_count) const {
  if (kp.size() != joint_count || kd.size() != joint_count ||
      !(kp.array() > 0.0).all() || !(kd.array() > 0.0).all()) {
    throw std::invalid_argument("gains must be positive with matching size");
  }
}

Eigen::VectorXd clamp_torques(const DynamicsModel& model,
                              const Eigen::VectorXd& tau) {
  return tau.cwiseMax(model.tau_min()).cwiseMin(model.tau_max());
}

Eigen::VectorXd computed_torque_unclamped(const DynamicsModel& model,
                                          const CoupledState& y,
                                          const Eigen::VectorXd& qdd_desired,
                                          const Eigen::VectorXd& e,
                                          const Eigen::VectorXd& ed,
                                          const TrackingGains& gains) {
  return model.mass_matrix(y.q) *
             (qdd_desired + gains.kp.cwiseProduct(e) + gains.kd.cwiseProduct(ed)) +
         model.coriolis(y.q, y.qd, y.qd) + model.gravity(y.q);
}

Eigen::VectorXd computed_torque(const DynamicsModel& model,
                                const CoupledState& y,
                                const Eigen::VectorXd& qdd_desired,
                                const Eigen::VectorXd& e,
                                const Eigen::VectorXd& ed,
                                const TrackingGains& gains) {
  return clamp_torques(model,
                       computed_torque_unclamped(model, y, qdd_desired, e, ed, gains));
}

Interval live_u_interval(const CoefficientTriple& live, double x,
                         const Eigen::VectorXd& tau_min,
                         const Eigen::VectorXd& tau_max) {
  Interval out = Interval::whole();
  for (int j = 0; j < live.a.size(); ++j) {
    const double affine = live.b[j] * x + live.c[j];
    out = out.intersect(cone_interval(live.a[j], 0.0, 1.0, tau_max[j] - affine));
    out = out.intersect(cone_interval(-live.a[j], 0.0, 1.0, affine - tau_min[j]));
    if (out.empty()) return out;
  }
  return out;
}

namespace {

// Transition window in u over the remaining distance to the next stage
// boundary, floored to avoid a vanishing window at the boundary itself.
Interval transition_window(const Interval& target, double x, double s,
                           const DiscretizationGrid& grid, int stage) {
  const double remaining =
      std::max(grid.s(stage + 1) - s, 1e-6 * grid.delta(stage));
  const double inv = 1.0 / (2.0 * remaining);
  return {(target.lo - x) * inv, (target.hi - x) * inv};
}

}  // namespace

PathControl topt_path_control(const ControllableSets& sets,
                              const DiscretizationGrid& grid, double s,
                              double x, const CoefficientTriple& live,
                              const Eigen::VectorXd& tau_min,
                              const Eigen::VectorXd& tau_max) {
  const int i = grid.stage_of(s);
  const Interval current = sets.sets[i];
  const Interval live_u = live_u_interval(live, x, tau_min, tau_max);

  PathControl out;
  if (live_u.empty()) {
    // No control satisfies the live rows; command the least-violating one.
    const double mid = 0.5 * (live_u.hi + live_u.lo);
    out.u = std::isfinite(mid) ? bounded(mid) : 0.0;
    out.infeasible = true;
    return out;
  }
  if (!current.contains(x)) {
    out.u = bounded(x > current.hi ? live_u.lo : live_u.hi);
    out.excursion = true;
    return out;
  }
  const Interval window = transition_window(sets.sets[i + 1], x, s, grid, i);
  const Interval admissible = live_u.intersect(window);
  if (admissible.empty()) {
    out.u = bounded(live_u.clamp(0.5 * (window.lo + window.hi)));
    out.infeasible = true;
    return out;
  }
  out.u = bounded(admissible.hi);
  return out;
}

PathControl os_path_control(const Profile& reference,
                            const DiscretizationGrid& grid, double s, double x,
                            const CoefficientTriple& live,
                            const Eigen::VectorXd& tau_min,
                            const Eigen::VectorXd& tau_max) {
  const double u_ref = profile_u_at(reference, grid, s);
  const double x_ref = profile_x_at(reference, grid, s);
  const Interval live_u = live_u_interval(live, x, tau_min, tau_max);

  PathControl out;
  if (live_u.empty()) {
    out.u = bounded(u_ref);
    out.infeasible = true;
    return out;
  }
  out.u = bounded(live_u.clamp(u_ref + (x_ref - x)));
  return out;
}

TimedReference::TimedReference(const Profile& profile,
                               const DiscretizationGrid& grid) {
  const int n = grid.stage_count();
  times_.resize(n + 1);
  s_.resize(n + 1);
  sd_.resize(n + 1);
  u_ = profile.u;
  times_[0] = 0.0;
  for (int i = 0; i <= n; ++i) {
    s_[i] = grid.s(i);
    sd_[i] = std::sqrt(std::max(profile.x[i], 0.0));
  }
  for (int i = 0; i < n; ++i) {
    const double pace = sd_[i] + sd_[i + 1];
    if (!(pace > 0.0)) {
      throw std::invalid_argument(
          "degenerate profile: interior segment with zero velocity");
    }
    times_[i + 1] = times_[i] + 2.0 * grid.delta(i) / pace;
  }
}

TimedReference::Sample TimedReference::at(double t) const {
  if (t >= times_.back()) {
    return {1.0, sd_.back(), 0.0};
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), std::max(t, 0.0));
  const int i =
      std::clamp(static_cast<int>(it - times_.begin()) - 1, 0,
                 static_cast<int>(u_.size()) - 1);
  const double dt = std::max(t, 0.0) - times_[i];
  Sample out;
  out.s = s_[i] + sd_[i] * dt + 0.5 * u_[i] * dt * dt;
  out.sd = sd_[i] + u_[i] * dt;
  out.u = u_[i];
  out.s = std::clamp(out.s, 0.0, 1.0);
  out.sd = std::max(out.sd, 0.0);
  return out;
}

PathTrackingController::PathTrackingController(const DynamicsModel& model,
                                               const PathSpline& path,
                                               ControlMode mode,
                                               const TrackingGains& gains)
    : model_(&model), path_(&path), mode_(mode), gains_(gains) {
  gains_.validate(model.joint_count());
  if (path.joint_count() != model.joint_count()) {
    throw std::invalid_argument("path and model joint counts differ");
  }
}

PathTrackingController PathTrackingController::topt(
    const DynamicsModel& model, const PathSpline& path,
    const DiscretizationGrid& grid, ControllableSets sets,
    const TrackingGains& gains) {
  if (!sets.feasible()) {
    throw std::invalid_argument("controllable sets are infeasible");
  }
  PathTrackingController c(model, path, ControlMode::kTopt, gains);
  c.grid_ = grid;
  c.sets_ = std::move(sets);
  return c;
}

PathTrackingController PathTrackingController::os(const DynamicsModel& model,
                                                  const PathSpline& path,
                                                  const DiscretizationGrid& grid,
                                                  Profile reference,
                                                  const TrackingGains& gains) {
  PathTrackingController c(model, path, ControlMode::kOs, gains);
  c.grid_ = grid;
  c.reference_ = std::move(reference);
  return c;
}

PathTrackingController PathTrackingController::tt(const DynamicsModel& model,
                                                  const PathSpline& path,
                                                  TimedReference reference,
                                                  const TrackingGains& gains) {
  PathTrackingController c(model, path, ControlMode::kTt, gains);
  c.timed_ = std::move(reference);
  return c;
}

Command PathTrackingController::sample(double t, const CoupledState& y) {
  double s_ref, sd_ref, u_ref = 0.0;
  PathControl pc;
  if (mode_ == ControlMode::kTt) {
    const TimedReference::Sample ref = timed_->at(t);
    s_ref = ref.s;
    sd_ref = ref.sd;
    u_ref = ref.u;
  } else {
    s_ref = std::clamp(y.s, 0.0, 1.0);
    sd_ref = y.sd;
  }
  const Eigen::VectorXd e = path_->position(s_ref) - y.q;
  const Eigen::VectorXd ed = path_->derivative(s_ref) * sd_ref - y.qd;
  if (mode_ != ControlMode::kTt) {
    const double x = sd_ref * sd_ref;
    const CoefficientTriple live = perturbed_coefficients(
        *model_, *path_, s_ref, sd_ref, e, ed, gains_.kp, gains_.kd);
    pc = mode_ == ControlMode::kTopt
             ? topt_path_control(sets_, grid_, s_ref, x, live,
                                 model_->tau_min(), model_->tau_max())
             : os_path_control(reference_, grid_, s_ref, x, live,
                               model_->tau_min(), model_->tau_max());
    u_ref = pc.u;
  }

  const Eigen::VectorXd qdd_d = path_->derivative(s_ref) * u_ref +
                                path_->second_derivative(s_ref) * sd_ref * sd_ref;
  Command cmd;
  cmd.tau = computed_torque(*model_, y, qdd_d, e, ed, gains_);
  cmd.u = u_ref;
  cmd.infeasible = pc.infeasible;
  cmd.excursion = pc.excursion;
  return cmd;
}

}  // namespace topt
