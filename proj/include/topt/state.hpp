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

namespace topt {

/// State of the coupled robot + path-parameterization system
/// y = (q, qd, s, sd) with s in [0, 1] and sd >= 0.
struct CoupledState {
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  double s = 0.0;
  double sd = 0.0;
};

}  // namespace topt
