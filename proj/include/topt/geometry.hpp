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

namespace topt {

/// One interpolation point of a geometric path: joint configuration q at
/// path coordinate s.
struct Waypoint {
  double s = 0.0;
  Eigen::VectorXd q;
};

/// Twice continuously differentiable joint-space path p : [0, 1] -> R^n,
/// represented as a natural cubic spline through given waypoints (zero second
/// derivative at both ends). Two waypoints degenerate to a straight line.
class PathSpline {
 public:
  /// An empty path; evaluation throws until assigned from interpolate().
  PathSpline() = default;

  /// Builds the spline. Requires at least two waypoints with strictly
  /// increasing s, first s exactly 0, last s exactly 1, and equal joint
  /// counts; throws std::invalid_argument otherwise.
  static PathSpline interpolate(const std::vector<Waypoint>& waypoints);

  int joint_count() const { return static_cast<int>(c0_.cols()); }

  /// Derivative of the given order (0, 1 or 2) at s in [0, 1]. Throws
  /// std::domain_error for s outside [0, 1] and std::invalid_argument for an
  /// unsupported order.
  Eigen::VectorXd eval(double s, int order) const;

  Eigen::VectorXd position(double s) const { return eval(s, 0); }
  Eigen::VectorXd derivative(double s) const { return eval(s, 1); }
  Eigen::VectorXd second_derivative(double s) const { return eval(s, 2); }

  const std::vector<double>& knots() const { return knots_; }

 private:
  int segment_index(double s) const;

  std::vector<double> knots_;
  // Row k holds the per-joint coefficient of (s - knots_[k])^d on segment k.
  Eigen::MatrixXd c0_, c1_, c2_, c3_;
};

}  // namespace topt
