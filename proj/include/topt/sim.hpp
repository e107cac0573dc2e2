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
#include <string>
#include <utility>
#include <vector>

#include "topt/control.hpp"
#include "topt/dynamics.hpp"
#include "topt/geometry.hpp"
#include "topt/interval.hpp"
#include "topt/state.hpp"

namespace topt {

struct SimParams {
  double dt_control = 1e-3;  // zero-order-hold window
  double rel_tol = 1e-8;     // integrator relative tolerance
  double abs_tol = 1e-10;
  double divergence_guard = 10.0;  // abort when ||(e, ed)|| exceeds this
  double max_time = 30.0;
  Interval terminal_sd{0.0, 0.0};  // admissible path velocity at s = 1
  double terminal_tol = 1e-3;      // tolerance on sqrt(x) at arrival
};

enum class SimStatus { kReached, kInfeasible, kDiverged, kTimedOut };

std::string to_string(SimStatus status);

/// Per-sample trace plus run verdict. Rows are recorded at the start of every
/// control window and once more at the final state.
struct SimResult {
  std::vector<double> t, s, x, u;
  std::vector<Eigen::VectorXd> q, qd, tau;
  std::vector<double> err_pos;    // ||p(s) - q||
  std::vector<double> err_mixed;  // ||(e, ed)||
  std::vector<uint8_t> infeasible;

  SimStatus status = SimStatus::kTimedOut;
  double duration = 0.0;
  double terminal_sd = 0.0;
  int infeasible_count = 0;
  int excursion_count = 0;
  double max_err_pos = 0.0;
};

/// Integrates the coupled plant + parameterization dynamics under the
/// controller with zero-order-hold commands, clamping torques to the plant
/// bounds and keeping sd >= 0. Terminates at s >= 1 (status judged against
/// terminal_sd), on the divergence guard, or at max_time. Requires y0.s = 0
/// and y0.sd >= 0.
SimResult simulate(const DynamicsModel& plant, const PathSpline& path,
                   Controller& controller, const CoupledState& y0,
                   const SimParams& params);

/// Least-squares fit of log(err) vs t over the pre-convergence window
/// (samples before the error first drops below 1e-6 of its initial value).
/// Returns (K, lambda) for the envelope K exp(-lambda t). All-zero errors
/// give (0, +inf); fewer than 10 positive samples throw
/// std::invalid_argument.
std::pair<double, double> exponential_decay_fit(const std::vector<double>& t,
                                                const std::vector<double>& err);
std::pair<double, double> exponential_decay_fit(const SimResult& result);

}  // namespace topt
