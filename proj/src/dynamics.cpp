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

#include "topt/dynamics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace topt {

void DynamicsModel::set_torque_bounds(const Eigen::VectorXd& tau_min,
                                      const Eigen::VectorXd& tau_max) {
  if (tau_min.size() != joint_count() || tau_max.size() != joint_count()) {
    throw std::invalid_argument("torque bound size mismatch");
  }
  if (!(tau_min.array() <= tau_max.array()).all()) {
    throw std::invalid_argument(
        "torque bounds must satisfy tau_min <= tau_max");
  }
  tau_min_ = tau_min;
  tau_max_ = tau_max;
}

Eigen::VectorXd inverse_dynamics(const DynamicsModel& model,
                                 const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& qdd) {
  return model.mass_matrix(q) * qdd + model.coriolis(q, qd, qd) +
         model.gravity(q);
}

Eigen::VectorXd forward_dynamics(const DynamicsModel& model,
                                 const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& tau) {
  const Eigen::VectorXd bias = model.coriolis(q, qd, qd) + model.gravity(q);
  return model.mass_matrix(q).llt().solve(tau - bias);
}

CoefficientTriple nominal_coefficients(const DynamicsModel& model,
                                       const PathSpline& path, double s) {
  const Eigen::VectorXd q = path.position(s);
  const Eigen::VectorXd dp = path.derivative(s);
  const Eigen::VectorXd ddp = path.second_derivative(s);
  const Eigen::MatrixXd m = model.mass_matrix(q);
  CoefficientTriple out;
  out.a = m * dp;
  out.b = m * ddp + model.coriolis(q, dp, dp);
  out.c = model.gravity(q);
  return out;
}

CoefficientTriple perturbed_coefficients(const DynamicsModel& model,
                                         const PathSpline& path, double s,
                                         double sd, const Eigen::VectorXd& e,
                                         const Eigen::VectorXd& ed,
                                         const Eigen::VectorXd& kp,
                                         const Eigen::VectorXd& kd) {
  const Eigen::VectorXd dp = path.derivative(s);
  const Eigen::VectorXd ddp = path.second_derivative(s);
  const Eigen::VectorXd q = path.position(s) - e;
  const Eigen::MatrixXd m = model.mass_matrix(q);
  CoefficientTriple out;
  out.a = m * dp;
  out.b = m * ddp + model.coriolis(q, dp, dp);
  out.c = m * (kp.cwiseProduct(e) + kd.cwiseProduct(ed)) -
          2.0 * sd * model.coriolis(q, ed, dp) + model.coriolis(q, ed, ed) +
          model.gravity(q);
  return out;
}

Pendulum::Pendulum(const Params& params) : p_(params) {
  if (p_.mass <= 0.0 || p_.length <= 0.0 || p_.inertia <= 0.0) {
    throw std::invalid_argument("pendulum parameters must be positive");
  }
  set_torque_bounds(Eigen::VectorXd::Constant(1, p_.tau_min),
                    Eigen::VectorXd::Constant(1, p_.tau_max));
}

Eigen::MatrixXd Pendulum::mass_matrix(const Eigen::VectorXd&) const {
  return Eigen::MatrixXd::Constant(1, 1, p_.inertia);
}

Eigen::VectorXd Pendulum::coriolis(const Eigen::VectorXd&,
                                   const Eigen::VectorXd&,
                                   const Eigen::VectorXd&) const {
  return Eigen::VectorXd::Zero(1);
}

Eigen::VectorXd Pendulum::gravity(const Eigen::VectorXd& q) const {
  return Eigen::VectorXd::Constant(
      1, p_.mass * p_.gravity * p_.length * std::sin(q[0]));
}

std::unique_ptr<DynamicsModel> Pendulum::with_mass_scale(double factor) const {
  if (factor <= 0.0) throw std::invalid_argument("mass scale must be positive");
  Params scaled = p_;
  scaled.mass *= factor;
  scaled.inertia *= factor;
  return std::make_unique<Pendulum>(scaled);
}

PlanarArm::PlanarArm(const Params& params) : p_(params) {
  if (p_.m1 <= 0.0 || p_.m2 <= 0.0 || p_.l1 <= 0.0 || p_.l2 <= 0.0 ||
      p_.lc1 <= 0.0 || p_.lc2 <= 0.0 || p_.i1 <= 0.0 || p_.i2 <= 0.0) {
    throw std::invalid_argument("arm parameters must be positive");
  }
  set_torque_bounds(p_.tau_min, p_.tau_max);
}

Eigen::MatrixXd PlanarArm::mass_matrix(const Eigen::VectorXd& q) const {
  const double c2 = std::cos(q[1]);
  const double m12 = p_.m2 * (p_.lc2 * p_.lc2 + p_.l1 * p_.lc2 * c2) + p_.i2;
  Eigen::Matrix2d m;
  m(0, 0) = p_.m1 * p_.lc1 * p_.lc1 + p_.i1 +
            p_.m2 * (p_.l1 * p_.l1 + p_.lc2 * p_.lc2 +
                     2.0 * p_.l1 * p_.lc2 * c2) +
            p_.i2;
  m(0, 1) = m12;
  m(1, 0) = m12;
  m(1, 1) = p_.m2 * p_.lc2 * p_.lc2 + p_.i2;
  return m;
}

Eigen::VectorXd PlanarArm::coriolis(const Eigen::VectorXd& q,
                                    const Eigen::VectorXd& v,
                                    const Eigen::VectorXd& w) const {
  // Nonzero Christoffel symbols: G_112 = G_121 = G_122 = -g2, G_211 = g2,
  // with g2 = m2 l1 lc2 sin(q2).
  const double g2 = p_.m2 * p_.l1 * p_.lc2 * std::sin(q[1]);
  Eigen::Vector2d out;
  out[0] = -g2 * (v[0] * w[1] + v[1] * w[0] + v[1] * w[1]);
  out[1] = g2 * v[0] * w[0];
  return out;
}

Eigen::VectorXd PlanarArm::gravity(const Eigen::VectorXd& q) const {
  const double c1 = std::cos(q[0]);
  const double c12 = std::cos(q[0] + q[1]);
  Eigen::Vector2d out;
  out[0] = (p_.m1 * p_.lc1 + p_.m2 * p_.l1) * p_.gravity * c1 +
           p_.m2 * p_.lc2 * p_.gravity * c12;
  out[1] = p_.m2 * p_.lc2 * p_.gravity * c12;
  return out;
}

std::unique_ptr<DynamicsModel> PlanarArm::with_mass_scale(double factor) const {
  if (factor <= 0.0) throw std::invalid_argument("mass scale must be positive");
  Params scaled = p_;
  scaled.m1 *= factor;
  scaled.m2 *= factor;
  scaled.i1 *= factor;
  scaled.i2 *= factor;
  return std::make_unique<PlanarArm>(scaled);
}

}  // namespace topt
