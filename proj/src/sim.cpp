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

#include "topt/sim.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace topt {

std::string to_string(SimStatus status) {
  switch (status) {
    case SimStatus::kReached:
      return "reached";
    case SimStatus::kInfeasible:
      return "infeasible";
    case SimStatus::kDiverged:
      return "diverged";
    case SimStatus::kTimedOut:
      return "timed_out";
  }
  return "unknown";
}

namespace {

constexpr double kArrivalTol = 1e-9;

using OdeState = std::vector<double>;

struct CoupledRhs {
  const DynamicsModel* plant;
  int n;
  Eigen::VectorXd tau;
  double u = 0.0;

  void operator()(const OdeState& z, OdeState& dz, double) const {
    const Eigen::Map<const Eigen::VectorXd> q(z.data(), n);
    const Eigen::Map<const Eigen::VectorXd> qd(z.data() + n, n);
    const Eigen::VectorXd qdd = forward_dynamics(*plant, q, qd, tau);
    dz.resize(2 * n + 2);
    for (int j = 0; j < n; ++j) {
      dz[j] = qd[j];
      dz[n + j] = qdd[j];
    }
    const double sd = z[2 * n + 1];
    // sd is kept nonnegative: path position never moves backward and a
    // braking control cannot push the velocity below zero.
    dz[2 * n] = std::max(sd, 0.0);
    dz[2 * n + 1] = (sd <= 0.0 && u < 0.0) ? 0.0 : u;
  }
};

struct ErrorPair {
  double pos;
  double mixed;
};

ErrorPair tracking_errors(const PathSpline& path, const CoupledState& y) {
  const double s = std::clamp(y.s, 0.0, 1.0);
  const Eigen::VectorXd e = path.position(s) - y.q;
  const Eigen::VectorXd ed = path.derivative(s) * y.sd - y.qd;
  return {e.norm(), std::sqrt(e.squaredNorm() + ed.squaredNorm())};
}

}  // namespace

SimResult simulate(const DynamicsModel& plant, const PathSpline& path,
                   Controller& controller, const CoupledState& y0,
                   const SimParams& params) {
  const int n = plant.joint_count();
  if (y0.q.size() != n || y0.qd.size() != n) {
    throw std::invalid_argument("initial state size mismatch");
  }
  if (y0.s != 0.0 || y0.sd < 0.0) {
    throw std::invalid_argument("initial state needs s = 0 and sd >= 0");
  }
  if (!(params.dt_control > 0.0)) {
    throw std::invalid_argument("control period must be positive");
  }

  OdeState z(2 * n + 2);
  for (int j = 0; j < n; ++j) {
    z[j] = y0.q[j];
    z[n + j] = y0.qd[j];
  }
  z[2 * n] = y0.s;
  z[2 * n + 1] = y0.sd;

  const auto unpack = [n](const OdeState& v) {
    CoupledState y;
    y.q = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    y.qd = Eigen::Map<const Eigen::VectorXd>(v.data() + n, n);
    y.s = v[2 * n];
    y.sd = v[2 * n + 1];
    return y;
  };

  SimResult result;
  CoupledRhs rhs{&plant, n, Eigen::VectorXd::Zero(n), 0.0};
  auto stepper = boost::numeric::odeint::make_controlled(
      params.abs_tol, params.rel_tol,
      boost::numeric::odeint::runge_kutta_dopri5<OdeState>());

  const auto record = [&](double t, const CoupledState& y,
                          const Eigen::VectorXd& tau, double u,
                          bool infeasible) {
    const ErrorPair err = tracking_errors(path, y);
    result.t.push_back(t);
    result.s.push_back(std::clamp(y.s, 0.0, 1.0));
    result.x.push_back(y.sd * y.sd);
    result.u.push_back(u);
    result.q.push_back(y.q);
    result.qd.push_back(y.qd);
    result.tau.push_back(tau);
    result.err_pos.push_back(err.pos);
    result.err_mixed.push_back(err.mixed);
    result.infeasible.push_back(infeasible ? 1 : 0);
    result.max_err_pos = std::max(result.max_err_pos, err.pos);
  };

  double t = 0.0;
  while (true) {
    if (t >= params.max_time) {
      result.status = SimStatus::kTimedOut;
      result.duration = t;
      result.terminal_sd = z[2 * n + 1];
      break;
    }
    const CoupledState y = unpack(z);
    Command cmd = controller.sample(t, y);
    cmd.tau = clamp_torques(plant, cmd.tau);
    if (cmd.infeasible) ++result.infeasible_count;
    if (cmd.excursion) ++result.excursion_count;
    record(t, y, cmd.tau, cmd.u, cmd.infeasible);

    rhs.tau = cmd.tau;
    rhs.u = cmd.u;
    const double s_before = z[2 * n];
    const double sd_before = z[2 * n + 1];
    boost::numeric::odeint::integrate_adaptive(stepper, rhs, z, t,
                                               t + params.dt_control,
                                               params.dt_control);
    t += params.dt_control;
    if (z[2 * n + 1] < 0.0) z[2 * n + 1] = 0.0;

    if (z[2 * n] >= 1.0 - kArrivalTol) {
      // Locate the crossing inside the window by linear interpolation.
      const double s_after = z[2 * n];
      double frac = 1.0;
      if (s_after > s_before) {
        frac = std::clamp((1.0 - s_before) / (s_after - s_before), 0.0, 1.0);
      }
      result.duration = t - params.dt_control + frac * params.dt_control;
      result.terminal_sd =
          sd_before + frac * (z[2 * n + 1] - sd_before);
      z[2 * n] = 1.0;
      result.status = params.terminal_sd.contains(result.terminal_sd,
                                                  params.terminal_tol)
                          ? SimStatus::kReached
                          : SimStatus::kInfeasible;
      break;
    }
    const ErrorPair err = tracking_errors(path, unpack(z));
    if (err.mixed > params.divergence_guard) {
      result.status = SimStatus::kDiverged;
      result.duration = t;
      result.terminal_sd = z[2 * n + 1];
      break;
    }
  }

  const CoupledState y_final = unpack(z);
  record(result.duration, y_final, rhs.tau, rhs.u, false);
  return result;
}

std::pair<double, double> exponential_decay_fit(const std::vector<double>& t,
                                                const std::vector<double>& err) {
  if (t.size() != err.size()) {
    throw std::invalid_argument("time and error series sizes differ");
  }
  bool any_positive = false;
  for (double v : err) any_positive |= v > 0.0;
  if (!any_positive) {
    return {0.0, std::numeric_limits<double>::infinity()};
  }

  // Pre-convergence window: stop once the error has decayed below 1e-6 of
  // its initial value (or hits zero), where integrator noise dominates.
  const double floor_value = err.front() * 1e-6;
  double sum_t = 0.0, sum_tt = 0.0, sum_y = 0.0, sum_ty = 0.0;
  int count = 0;
  for (size_t k = 0; k < err.size(); ++k) {
    if (!(err[k] > 0.0) || err[k] < floor_value) break;
    const double y = std::log(err[k]);
    sum_t += t[k];
    sum_tt += t[k] * t[k];
    sum_y += y;
    sum_ty += t[k] * y;
    ++count;
  }
  if (count < 10) {
    throw std::invalid_argument("need at least 10 positive error samples");
  }
  const double denom = count * sum_tt - sum_t * sum_t;
  const double slope = (count * sum_ty - sum_t * sum_y) / denom;
  const double intercept = (sum_y - slope * sum_t) / count;
  return {std::exp(intercept), -slope};
}

std::pair<double, double> exponential_decay_fit(const SimResult& result) {
  return exponential_decay_fit(result.t, result.err_mixed);
}

}  // namespace topt
