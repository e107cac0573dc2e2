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
#include <memory>

#include "topt/geometry.hpp"

namespace topt {

/// Rigid-body manipulator dynamics
///
///   M(q) qdd + C(q; qd, qd) + h(q) = tau,
///
/// where C(q; v, w) is the symmetric Christoffel bilinear form (v = w = qd
/// gives the usual Coriolis/centrifugal torque) and h collects gravity.
/// Actuation is box-bounded: tau_min <= tau <= tau_max componentwise.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual int joint_count() const = 0;

  /// Symmetric positive definite mass matrix M(q).
  virtual Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const = 0;

  /// Christoffel contraction C(q; v, w), component i equal to
  /// sum_jk Gamma_ijk(q) v_j w_k. Symmetric in (v, w).
  virtual Eigen::VectorXd coriolis(const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& v,
                                   const Eigen::VectorXd& w) const = 0;

  /// Gravity torque h(q).
  virtual Eigen::VectorXd gravity(const Eigen::VectorXd& q) const = 0;

  /// Copy of this model with every mass and inertia multiplied by factor.
  /// Torque bounds are unchanged; used to build perturbed plants.
  virtual std::unique_ptr<DynamicsModel> with_mass_scale(double factor) const = 0;

  const Eigen::VectorXd& tau_min() const { return tau_min_; }
  const Eigen::VectorXd& tau_max() const { return tau_max_; }

 protected:
  /// Throws std::invalid_argument unless tau_min <= tau_max componentwise
  /// with the expected sizes. Equal bounds are allowed; they usually make
  /// every tracking problem infeasible but remain a valid model.
  void set_torque_bounds(const Eigen::VectorXd& tau_min,
                         const Eigen::VectorXd& tau_max);

  Eigen::VectorXd tau_min_, tau_max_;
};

/// tau = M(q) qdd + C(q; qd, qd) + h(q).
Eigen::VectorXd inverse_dynamics(const DynamicsModel& model,
                                 const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& qdd);

/// qdd = M(q)^-1 (tau - C(q; qd, qd) - h(q)).
Eigen::VectorXd forward_dynamics(const DynamicsModel& model,
                                 const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& tau);

/// Per-joint coefficients of the path-restricted torque map
/// tau = a(s) u + b(s) x + c(s) with u = sdd and x = sd^2.
struct CoefficientTriple {
  Eigen::VectorXd a, b, c;
};

/// Coefficients of the zero-error restriction q = p(s):
///   a = M p', b = M p'' + C(p; p', p'), c = h(p).
CoefficientTriple nominal_coefficients(const DynamicsModel& model,
                                       const PathSpline& path, double s);

/// Coefficients of the clamped computed-torque law before clamping, at
/// tracking error e = q_d - q and ed = qd_d - qd, with diagonal gains kp, kd:
///   tau = a_hat u + b_hat x + c_hat,
///   a_hat = M(q) p', b_hat = M(q) p'' + C(q; p', p'),
///   c_hat = M(q)(kp.*e + kd.*ed) - 2 C(q; ed, p') sd + C(q; ed, ed) + h(q),
/// where q = p(s) - e and qd = p'(s) sd - ed. Collapses to the nominal
/// coefficients at zero error.
CoefficientTriple perturbed_coefficients(const DynamicsModel& model,
                                         const PathSpline& path, double s,
                                         double sd, const Eigen::VectorXd& e,
                                         const Eigen::VectorXd& ed,
                                         const Eigen::VectorXd& kp,
                                         const Eigen::VectorXd& kd);

/// Point-mass pendulum: a single revolute joint with mass m at distance l
/// from the pivot, rotational inertia I about the pivot, and gravity g acting
/// on the angle measured from the downward vertical. g = 0 and I = 1 give a
/// pure double integrator.
class Pendulum final : public DynamicsModel {
 public:
  struct Params {
    double mass = 1.0;
    double length = 1.0;
    double inertia = 1.0;
    double gravity = 9.81;
    double tau_min = -1.0;
    double tau_max = 1.0;
  };

  explicit Pendulum(const Params& params);

  int joint_count() const override { return 1; }
  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const override;
  Eigen::VectorXd coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                           const Eigen::VectorXd& w) const override;
  Eigen::VectorXd gravity(const Eigen::VectorXd& q) const override;
  std::unique_ptr<DynamicsModel> with_mass_scale(double factor) const override;

 private:
  Params p_;
};

/// Two-link revolute planar arm in a vertical plane. Link i has mass m_i,
/// length l_i, center of mass at distance lc_i along the link, and rotational
/// inertia I_i about its center of mass. Angles follow the usual convention:
/// q1 from the horizontal axis, q2 relative to link 1.
class PlanarArm final : public DynamicsModel {
 public:
  struct Params {
    double m1 = 1.0, m2 = 1.0;
    double l1 = 1.0, l2 = 1.0;
    double lc1 = 0.5, lc2 = 0.5;
    double i1 = 0.1, i2 = 0.1;
    double gravity = 9.81;
    Eigen::Vector2d tau_min{-10.0, -10.0};
    Eigen::Vector2d tau_max{10.0, 10.0};
  };

  explicit PlanarArm(const Params& params);

  int joint_count() const override { return 2; }
  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const override;
  Eigen::VectorXd coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                           const Eigen::VectorXd& w) const override;
  Eigen::VectorXd gravity(const Eigen::VectorXd& q) const override;
  std::unique_ptr<DynamicsModel> with_mass_scale(double factor) const override;

 private:
  Params p_;
};

}  // namespace topt
