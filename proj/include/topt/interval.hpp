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

#include <algorithm>
#include <limits>

namespace topt {

/// Closed interval [lo, hi] on the real line. Empty iff lo > hi; the
/// default-constructed value is empty. Endpoints may be infinite.
struct Interval {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  static Interval whole() {
    return {-std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  }
  static Interval point(double v) { return {v, v}; }

  bool empty() const { return lo > hi; }
  double width() const { return empty() ? 0.0 : hi - lo; }

  bool contains(double v, double tol = 0.0) const {
    return !empty() && v >= lo - tol && v <= hi + tol;
  }

  /// True if [lo, hi] contains all of other (empty is contained in anything).
  bool contains(const Interval& other, double tol = 0.0) const {
    if (other.empty()) return true;
    return contains(other.lo, tol) && contains(other.hi, tol);
  }

  Interval intersect(const Interval& other) const {
    return {std::max(lo, other.lo), std::min(hi, other.hi)};
  }

  /// Nearest point of a nonempty interval.
  double clamp(double v) const { return std::min(std::max(v, lo), hi); }
};

}  // namespace topt
