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
#include <vector>

#include "topt/dynamics.hpp"
#include "topt/geometry.hpp"
#include "topt/interval.hpp"

namespace topt {

/// Uniform discretization of the path coordinate into stages
/// 0 = s_0 < s_1 < ... < s_N = 1 with spacing 1/N. The squared-velocity
/// state x = sd^2 evolves across stage i as x_{i+1} = x_i + 2 delta(i) u_i.
class DiscretizationGrid {
 public:
  /// Throws std::invalid_argument unless stage_count >= 1.
  explicit DiscretizationGrid(int stage_count);

  int stage_count() const { return stage_count_; }
  double s(int i) const { return static_cast<double>(i) / stage_count_; }
  double delta(int) const { return 1.0 / stage_count_; }

  /// Index i with s in [s_i, s_{i+1}), clamped to the final stage for s = 1.
  int stage_of(double s) const;

 private:
  int stage_count_;
};

/// Torque-constraint data of one stage: tau_min <= a u + b x + c + d <= tau_max
/// must hold for every disturbance d with ||(da_j, db_j, dc_j)||_2 <= radius
/// applied per joint to the coefficient rows.
struct StageConstraints {
  Eigen::VectorXd a, b, c;
  Eigen::VectorXd tau_min, tau_max;
  double radius = 0.0;
};

/// Squared-velocity transition across a stage: x + 2 delta u.
inline double transition(double x, double u, double delta) {
  return x + 2.0 * delta * u;
}

/// Solution set in u of a u + radius * sqrt(u^2 + m2) <= beta with m2 > 0.
/// Closed form of the worst-case (robust) single-row constraint; the set is
/// always an interval (possibly empty or unbounded).
Interval cone_interval(double a, double radius, double m2, double beta);

/// Controls u robustly admissible at squared velocity x >= 0: intersection of
/// the upper- and lower-bound cone intervals over all joints.
Interval robust_u_interval(const StageConstraints& sc, double x);

/// Squared velocities x at which robust_u_interval can be nonempty, i.e. every
/// single-joint robust control set is nonempty (their intersection may still
/// be empty, so this is a necessary condition that narrows searches).
Interval robust_x_domain(const StageConstraints& sc);

/// One-step robust controllable set: the x in [0, x_max] from which some
/// robustly admissible u reaches the target interval across a stage of width
/// delta. Endpoints located by bisection to tolerance. Empty target gives an
/// empty result.
Interval robust_one_step_set(const StageConstraints& sc, const Interval& target,
                             double delta, double x_max, double tol = 1e-8);

/// Backward recursion output. sets[i] is the robust controllable set at stage
/// boundary i (size stage_count + 1); once a set is empty every earlier set is
/// empty and first_empty_stage records the largest such boundary index.
struct ControllableSets {
  std::vector<Interval> sets;
  int first_empty_stage = -1;

  bool feasible() const { return first_empty_stage < 0; }
};

/// Runs the backward recursion from the terminal squared-velocity interval.
/// constraints[i] describes stage [s_i, s_{i+1}] and must have size
/// grid.stage_count().
ControllableSets compute_controllable_sets(
    const std::vector<StageConstraints>& constraints,
    const DiscretizationGrid& grid, const Interval& terminal, double x_max,
    double tol = 1e-8);

/// Greedy forward pass: from x_0 = start, apply at each stage the largest
/// control that keeps the next state inside the next controllable set.
struct Profile {
  std::vector<double> x;  // squared velocity at each boundary, size N + 1
  std::vector<double> u;  // stage controls, size N
  double duration = 0.0;  // sum of exact per-stage traversal times
};

/// Throws std::invalid_argument if start is outside sets.sets[0] or the sets
/// are infeasible.
Profile solve_time_optimal_profile(const std::vector<StageConstraints>& constraints,
                                   const DiscretizationGrid& grid,
                                   const ControllableSets& sets, double start);

/// Time to traverse the profile, exact for piecewise-constant u:
/// sum_i 2 delta / (sqrt(x_i) + sqrt(x_{i+1})).
double profile_duration(const Profile& profile, const DiscretizationGrid& grid);

/// Piecewise interpolation of the profile at path coordinate s: x varies
/// linearly in s within a stage (constant u), u is piecewise constant.
double profile_x_at(const Profile& profile, const DiscretizationGrid& grid,
                    double s);
double profile_u_at(const Profile& profile, const DiscretizationGrid& grid,
                    double s);

/// Per-stage constraint coefficients evaluated at the left grid points s_i,
/// with the model's torque bounds and the given disturbance radius. The
/// parallel variant distributes stages across OpenMP threads and returns
/// bitwise-identical results.
std::vector<StageConstraints> build_constraint_table_serial(
    const DynamicsModel& model, const PathSpline& path,
    const DiscretizationGrid& grid, double radius);
std::vector<StageConstraints> build_constraint_table(
    const DynamicsModel& model, const PathSpline& path,
    const DiscretizationGrid& grid, double radius);

}  // namespace topt
