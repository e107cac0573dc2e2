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

#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "topt/dynamics.hpp"
#include "topt/geometry.hpp"
#include "topt/interval.hpp"
#include "topt/reachability.hpp"
#include "topt/state.hpp"

namespace topt {

/// Diagonal PD gains of the computed-torque loop.
struct TrackingGains {
  Eigen::VectorXd kp, kd;

  /// kp = omega^2, kd = 2 omega per joint (critically damped pair).
  static TrackingGains critically_damped(int joint_count, double omega);

  /// Throws std::invalid_argument unless all entries are positive and sizes
  /// match joint_count.
  void validate(int joint_count) const;
};

/// Componentwise clamp to the model's torque bounds.
Eigen::VectorXd clamp_torques(const DynamicsModel& model,
                              const Eigen::VectorXd& tau);

/// Computed-torque law tau = M(q)[qdd_d + kp.*e + kd.*ed] + C(q; qd, qd) + h(q)
/// with e = q_d - q, ed = qd_d - qd, before clamping.
Eigen::VectorXd computed_torque_unclamped(const DynamicsModel& model,
                                          const CoupledState& y,
                                          const Eigen::VectorXd& qdd_desired,
                                          const Eigen::VectorXd& e,
                                          const Eigen::VectorXd& ed,
                                          const TrackingGains& gains);

/// Computed-torque law clamped to the model's torque bounds.
Eigen::VectorXd computed_torque(const DynamicsModel& model,
                                const CoupledState& y,
                                const Eigen::VectorXd& qdd_desired,
                                const Eigen::VectorXd& e,
                                const Eigen::VectorXd& ed,
                                const TrackingGains& gains);

/// Path accelerations u with tau_min <= a u + b x + c <= tau_max per joint
/// for measured (live) coefficients; linear rows, so plain interval algebra.
Interval live_u_interval(const CoefficientTriple& live, double x,
                         const Eigen::VectorXd& tau_min,
                         const Eigen::VectorXd& tau_max);

/// Outcome of one path-control decision.
struct PathControl {
  double u = 0.0;
  /// Live torque-feasible set intersected with the transition requirement was
  /// empty; u is a fallback.
  bool infeasible = false;
  /// x was outside the current controllable set.
  bool excursion = false;
};

/// Robust time-optimal law: the greatest live-feasible u whose transition over
/// the remaining stage distance lands in the next controllable set. Outside
/// the current set, commands the extreme live-feasible u driving x back
/// (most negative above the set, most positive below) and flags an excursion.
/// An empty live window flags infeasible and picks the least-violating u.
PathControl topt_path_control(const ControllableSets& sets,
                              const DiscretizationGrid& grid, double s,
                              double x, const CoefficientTriple& live,
                              const Eigen::VectorXd& tau_min,
                              const Eigen::VectorXd& tau_max);

/// Online-scaling baseline: unit-gain proportional tracking of the reference
/// squared-velocity profile, clamped to the live torque-feasible interval.
/// When that interval is empty, applies the nominal reference control and
/// flags infeasible.
PathControl os_path_control(const Profile& reference,
                            const DiscretizationGrid& grid, double s, double x,
                            const CoefficientTriple& live,
                            const Eigen::VectorXd& tau_min,
                            const Eigen::VectorXd& tau_max);

/// Fixed time-indexed replay of a nominal profile: s(t), sd(t) and the stage
/// control u(t), piecewise constant-acceleration in time.
class TimedReference {
 public:
  struct Sample {
    double s = 0.0, sd = 0.0, u = 0.0;
  };

  /// Throws std::invalid_argument on a degenerate profile (an interior
  /// segment with zero velocity at both ends never finishes).
  TimedReference(const Profile& profile, const DiscretizationGrid& grid);

  double duration() const { return times_.back(); }

  /// Sample at time t; clamped to the final state (s = 1, terminal sd, u = 0)
  /// past the end.
  Sample at(double t) const;

 private:
  std::vector<double> times_;  // boundary passage times, size N + 1
  std::vector<double> s_, sd_, u_;
};

enum class ControlMode { kTopt, kOs, kTt };

/// Closed-loop command for one control sample.
struct Command {
  Eigen::VectorXd tau;
  double u = 0.0;
  bool infeasible = false;
  bool excursion = false;
};

/// Samples torque and path acceleration from the full coupled state.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual Command sample(double t, const CoupledState& y) = 0;
};

/// The three path-tracking controllers behind one interface: TOPT (robust
/// set-based), OS (online scaling of a nominal profile) and TT (fixed-time
/// replay of a nominal profile). All share the clamped computed-torque inner
/// loop. The model and path must outlive the controller.
class PathTrackingController final : public Controller {
 public:
  static PathTrackingController topt(const DynamicsModel& model,
                                     const PathSpline& path,
                                     const DiscretizationGrid& grid,
                                     ControllableSets sets,
                                     const TrackingGains& gains);
  static PathTrackingController os(const DynamicsModel& model,
                                   const PathSpline& path,
                                   const DiscretizationGrid& grid,
                                   Profile reference,
                                   const TrackingGains& gains);
  static PathTrackingController tt(const DynamicsModel& model,
                                   const PathSpline& path,
                                   TimedReference reference,
                                   const TrackingGains& gains);

  Command sample(double t, const CoupledState& y) override;

  ControlMode mode() const { return mode_; }

 private:
  PathTrackingController(const DynamicsModel& model, const PathSpline& path,
                         ControlMode mode, const TrackingGains& gains);

  const DynamicsModel* model_;
  const PathSpline* path_;
  ControlMode mode_;
  TrackingGains gains_;
  DiscretizationGrid grid_{1};
  ControllableSets sets_;              // TOPT
  Profile reference_;                  // OS
  std::optional<TimedReference> timed_;  // TT
};

}  // namespace topt
