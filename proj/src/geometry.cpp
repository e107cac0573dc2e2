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

#include "topt/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace topt {

namespace {

// Solves the natural-spline tridiagonal system for the second derivatives at
// the knots, one right-hand side per joint. Returns a (m+1) x n matrix of
// second derivatives sigma with sigma.row(0) = sigma.row(m) = 0.
Eigen::MatrixXd solve_second_derivatives(const std::vector<double>& h,
                                         const Eigen::MatrixXd& y) {
  const int m = static_cast<int>(h.size());
  const int n = static_cast<int>(y.cols());
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(m + 1, n);
  const int interior = m - 1;
  if (interior <= 0) return sigma;

  Eigen::VectorXd diag(interior);
  Eigen::MatrixXd rhs(interior, n);
  for (int i = 0; i < interior; ++i) {
    diag[i] = 2.0 * (h[i] + h[i + 1]);
    rhs.row(i) = 6.0 * ((y.row(i + 2) - y.row(i + 1)) / h[i + 1] -
                        (y.row(i + 1) - y.row(i)) / h[i]);
  }
  // Thomas algorithm; sub/super diagonal entry between rows i and i+1 is
  // h[i+1]. All joints share the factorization.
  std::vector<double> upper(interior, 0.0);
  for (int i = 1; i < interior; ++i) {
    upper[i - 1] = h[i] / diag[i - 1];
    diag[i] -= upper[i - 1] * h[i];
    rhs.row(i) -= upper[i - 1] * rhs.row(i - 1);
  }
  sigma.row(interior) = rhs.row(interior - 1) / diag[interior - 1];
  for (int i = interior - 2; i >= 0; --i) {
    sigma.row(i + 1) = (rhs.row(i) - h[i + 1] * sigma.row(i + 2)) / diag[i];
  }
  return sigma;
}

}  // namespace

PathSpline PathSpline::interpolate(const std::vector<Waypoint>& waypoints) {
  if (waypoints.size() < 2) {
    throw std::invalid_argument("path needs at least two waypoints");
  }
  if (waypoints.front().s != 0.0 || waypoints.back().s != 1.0) {
    throw std::invalid_argument("path coordinate must start at 0 and end at 1");
  }
  const int n = static_cast<int>(waypoints.front().q.size());
  if (n < 1) {
    throw std::invalid_argument("waypoints must have at least one joint");
  }
  for (size_t k = 0; k < waypoints.size(); ++k) {
    if (waypoints[k].q.size() != n) {
      throw std::invalid_argument("waypoints disagree on joint count");
    }
    if (k > 0 && waypoints[k].s <= waypoints[k - 1].s) {
      throw std::invalid_argument("waypoint coordinates must increase");
    }
  }

  const int m = static_cast<int>(waypoints.size()) - 1;
  std::vector<double> h(m);
  Eigen::MatrixXd y(m + 1, n);
  for (int k = 0; k <= m; ++k) y.row(k) = waypoints[k].q.transpose();
  for (int k = 0; k < m; ++k) h[k] = waypoints[k + 1].s - waypoints[k].s;

  const Eigen::MatrixXd sigma = solve_second_derivatives(h, y);

  PathSpline spline;
  spline.knots_.resize(m + 1);
  for (int k = 0; k <= m; ++k) spline.knots_[k] = waypoints[k].s;
  spline.c0_.resize(m, n);
  spline.c1_.resize(m, n);
  spline.c2_.resize(m, n);
  spline.c3_.resize(m, n);
  for (int k = 0; k < m; ++k) {
    spline.c0_.row(k) = y.row(k);
    spline.c1_.row(k) = (y.row(k + 1) - y.row(k)) / h[k] -
                        h[k] / 6.0 * (2.0 * sigma.row(k) + sigma.row(k + 1));
    spline.c2_.row(k) = sigma.row(k) / 2.0;
    spline.c3_.row(k) = (sigma.row(k + 1) - sigma.row(k)) / (6.0 * h[k]);
  }
  return spline;
}

int PathSpline::segment_index(double s) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  const int idx = static_cast<int>(it - knots_.begin()) - 1;
  return std::clamp(idx, 0, static_cast<int>(knots_.size()) - 2);
}

Eigen::VectorXd PathSpline::eval(double s, int order) const {
  if (knots_.empty()) {
    throw std::logic_error("evaluating an empty path");
  }
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::domain_error("path coordinate outside [0, 1]");
  }
  const int k = segment_index(s);
  const double d = s - knots_[k];
  switch (order) {
    case 0:
      return c0_.row(k) + d * (c1_.row(k) + d * (c2_.row(k) + d * c3_.row(k)));
    case 1:
      return c1_.row(k) + d * (2.0 * c2_.row(k) + d * 3.0 * c3_.row(k));
    case 2:
      return 2.0 * c2_.row(k) + d * 6.0 * c3_.row(k);
    default:
      throw std::invalid_argument("derivative order must be 0, 1 or 2");
  }
}

}  // namespace topt
