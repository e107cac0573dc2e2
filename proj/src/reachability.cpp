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

#include "topt/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topt {

DiscretizationGrid::DiscretizationGrid(int stage_count)
    : stage_count_(stage_count) {
  if (stage_count < 1) {
    throw std::invalid_argument("grid needs at least one stage");
  }
}

int DiscretizationGrid::stage_of(double s) const {
  // floor(s * N) can land one stage low (or high) when s is an exact grid
  // point whose product rounds across the integer; correct against the s(i)
  // accessor so boundaries classify consistently.
  int i = std::clamp(static_cast<int>(std::floor(s * stage_count_)), 0,
                     stage_count_ - 1);
  if (i + 1 < stage_count_ && s >= this->s(i + 1)) ++i;
  if (i > 0 && s < this->s(i)) --i;
  return i;
}

Interval cone_interval(double a, double radius, double m2, double beta) {
  if (radius < 0.0 || !(m2 > 0.0)) {
    throw std::invalid_argument("cone_interval needs radius >= 0 and m2 > 0");
  }
  if (radius == 0.0) {
    if (a > 0.0) return {-std::numeric_limits<double>::infinity(), beta / a};
    if (a < 0.0) return {beta / a, std::numeric_limits<double>::infinity()};
    return beta >= 0.0 ? Interval::whole() : Interval{};
  }
  // a u + radius sqrt(u^2 + m2) <= beta. Squaring on the side a u <= beta
  // gives A u^2 + 2 a beta u + (radius^2 m2 - beta^2) <= 0 with
  // A = radius^2 - a^2; the discriminant/4 is radius^2 (beta^2 - m2 A).
  const double A = radius * radius - a * a;
  if (A > 0.0) {
    // Left-hand side is coercive: solutions form a bounded interval,
    // nonempty iff beta >= sqrt(m2 A) (minimum of the LHS).
    const double gap = beta * beta - m2 * A;
    if (beta < 0.0 || gap < 0.0) return {};
    const double root = radius * std::sqrt(gap);
    return {(-a * beta - root) / A, (-a * beta + root) / A};
  }
  if (A == 0.0) {
    // |a| == radius: LHS -> 0 on one side, so a strictly positive beta
    // admits a half-line; beta <= 0 admits nothing (m2 > 0).
    if (beta <= 0.0) return {};
    const double u = (beta * beta - radius * radius * m2) / (2.0 * a * beta);
    if (a > 0.0) return {-std::numeric_limits<double>::infinity(), u};
    return {u, std::numeric_limits<double>::infinity()};
  }
  // |a| > radius: one half-line always qualifies; the quadratic's
  // discriminant is positive, and the admissible root is the one on the
  // a u <= beta side.
  const double root = radius * std::sqrt(beta * beta - m2 * A);
  if (a > 0.0) {
    return {-std::numeric_limits<double>::infinity(), (-a * beta + root) / A};
  }
  return {(-a * beta - root) / A, std::numeric_limits<double>::infinity()};
}

Interval robust_u_interval(const StageConstraints& sc, double x) {
  const double m2 = x * x + 1.0;
  Interval out = Interval::whole();
  for (int j = 0; j < sc.a.size(); ++j) {
    const double affine = sc.b[j] * x + sc.c[j];
    out = out.intersect(
        cone_interval(sc.a[j], sc.radius, m2, sc.tau_max[j] - affine));
    if (out.empty()) return out;
    out = out.intersect(
        cone_interval(-sc.a[j], sc.radius, m2, affine - sc.tau_min[j]));
    if (out.empty()) return out;
  }
  return out;
}

Interval robust_x_domain(const StageConstraints& sc) {
  // For joint j, the u-set from the pair of rows (+-a_j) is nonempty only
  // where beta_j(x) >= sqrt((x^2+1) max(R^2 - a_j^2, 0)), which is again a
  // cone constraint, now in x with unit offset. Rows with |a_j| > R never
  // restrict x.
  Interval out = Interval::whole();
  for (int j = 0; j < sc.a.size(); ++j) {
    const double A = sc.radius * sc.radius - sc.a[j] * sc.a[j];
    if (A < 0.0) continue;
    const double r = std::sqrt(A);
    out = out.intersect(cone_interval(sc.b[j], r, 1.0, sc.tau_max[j] - sc.c[j]));
    out = out.intersect(cone_interval(-sc.b[j], r, 1.0, sc.c[j] - sc.tau_min[j]));
    if (out.empty()) return out;
  }
  return out;
}

namespace {

// Signed infeasibility margin of stage sc at squared velocity x against the
// transition window into target: <= 0 iff some robustly admissible u lands in
// target. The sign is exact; the magnitude is not trustworthy for search,
// because an empty robust u-interval carries meaningless finite endpoints.
double transition_gap(const StageConstraints& sc, const Interval& target,
                      double delta, double x) {
  const Interval u = robust_u_interval(sc, x);
  const double inv = 1.0 / (2.0 * delta);
  const double lo = std::max(u.lo, (target.lo - x) * inv);
  const double hi = std::min(u.hi, (target.hi - x) * inv);
  return lo - hi;
}

}  // namespace

Interval robust_one_step_set(const StageConstraints& sc, const Interval& target,
                             double delta, double x_max, double tol) {
  if (target.empty()) return {};
  if (!(delta > 0.0) || !(x_max > 0.0)) {
    throw std::invalid_argument("one-step set needs delta > 0 and x_max > 0");
  }
  const Interval domain =
      robust_x_domain(sc).intersect({0.0, x_max});
  if (domain.empty()) return {};

  const auto gap = [&](double x) { return transition_gap(sc, target, delta, x); };

  // The feasible x-set is an interval (projection of the convex (x, u)
  // feasibility region), but it can be a sliver inside a domain whose gap
  // values are garbage wherever the robust u-interval is empty. Scan for a
  // certified feasible point (gap sign is exact), then refine around the
  // best scan point in case the sliver falls between grid points.
  constexpr int kScanPoints = 2048;
  const double span = domain.hi - domain.lo;
  double x_best = domain.lo;
  double g_best = gap(domain.lo);
  for (int k = 1; k <= kScanPoints && g_best > 0.0; ++k) {
    const double x = domain.lo + span * k / kScanPoints;
    const double g = gap(x);
    if (g < g_best) {
      g_best = g;
      x_best = x;
    }
  }
  if (g_best > 0.0) {
    const double step = span / kScanPoints;
    double lo = std::max(domain.lo, x_best - step);
    double hi = std::min(domain.hi, x_best + step);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (gap(m1) <= gap(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    x_best = 0.5 * (lo + hi);
    if (gap(x_best) > 0.0) return {};
  }

  // Bisect each endpoint between the infeasible domain edge and the feasible
  // minimizer, keeping the feasible side (inner approximation).
  const auto edge = [&](double infeasible_end, double feasible_end) {
    if (gap(infeasible_end) <= 0.0) return infeasible_end;
    double bad = infeasible_end, good = feasible_end;
    while (std::abs(good - bad) > tol) {
      const double mid = 0.5 * (bad + good);
      (gap(mid) <= 0.0 ? good : bad) = mid;
    }
    return good;
  };
  return {edge(domain.lo, x_best), edge(domain.hi, x_best)};
}

ControllableSets compute_controllable_sets(
    const std::vector<StageConstraints>& constraints,
    const DiscretizationGrid& grid, const Interval& terminal, double x_max,
    double tol) {
  const int n = grid.stage_count();
  if (static_cast<int>(constraints.size()) != n) {
    throw std::invalid_argument("constraint table size must match stage count");
  }
  if (!terminal.empty() && terminal.lo < 0.0) {
    throw std::invalid_argument("terminal set must lie in x >= 0");
  }
  ControllableSets out;
  out.sets.assign(n + 1, Interval{});
  out.sets[n] = terminal;
  if (terminal.empty()) out.first_empty_stage = n;
  for (int i = n - 1; i >= 0; --i) {
    if (out.sets[i + 1].empty()) continue;  // empty propagates backward
    out.sets[i] = robust_one_step_set(constraints[i], out.sets[i + 1],
                                      grid.delta(i), x_max, tol);
    if (out.sets[i].empty() && out.first_empty_stage < 0) {
      out.first_empty_stage = i;
    }
  }
  return out;
}

Profile solve_time_optimal_profile(
    const std::vector<StageConstraints>& constraints,
    const DiscretizationGrid& grid, const ControllableSets& sets,
    double start) {
  const int n = grid.stage_count();
  if (!sets.feasible()) {
    throw std::invalid_argument("controllable sets are infeasible");
  }
  if (!sets.sets[0].contains(start)) {
    throw std::invalid_argument("start state outside the controllable set");
  }
  Profile profile;
  profile.x.assign(n + 1, 0.0);
  profile.u.assign(n, 0.0);
  profile.x[0] = start;
  for (int i = 0; i < n; ++i) {
    const double inv = 1.0 / (2.0 * grid.delta(i));
    const Interval u = robust_u_interval(constraints[i], profile.x[i]);
    const Interval& next = sets.sets[i + 1];
    // Greatest control that both respects the robust constraints and lands
    // in the next controllable set. Feasibility up to the bisection
    // tolerance is guaranteed for states inside the sets.
    double ui = std::min(u.hi, (next.hi - profile.x[i]) * inv);
    ui = std::max(ui, std::max(u.lo, (next.lo - profile.x[i]) * inv));
    profile.u[i] = ui;
    profile.x[i + 1] = next.clamp(profile.x[i] + 2.0 * grid.delta(i) * ui);
  }
  profile.duration = profile_duration(profile, grid);
  return profile;
}

double profile_duration(const Profile& profile, const DiscretizationGrid& grid) {
  double total = 0.0;
  for (int i = 0; i < grid.stage_count(); ++i) {
    total += 2.0 * grid.delta(i) /
             (std::sqrt(profile.x[i]) + std::sqrt(profile.x[i + 1]));
  }
  return total;
}

double profile_x_at(const Profile& profile, const DiscretizationGrid& grid,
                    double s) {
  const int i = grid.stage_of(s);
  const double w = (s - grid.s(i)) / grid.delta(i);
  return profile.x[i] + (profile.x[i + 1] - profile.x[i]) * w;
}

double profile_u_at(const Profile& profile, const DiscretizationGrid& grid,
                    double s) {
  return profile.u[grid.stage_of(s)];
}

std::vector<StageConstraints> build_constraint_table_serial(
    const DynamicsModel& model, const PathSpline& path,
    const DiscretizationGrid& grid, double radius) {
  std::vector<StageConstraints> table(grid.stage_count());
  for (int i = 0; i < grid.stage_count(); ++i) {
    const CoefficientTriple tri = nominal_coefficients(model, path, grid.s(i));
    table[i] = {tri.a, tri.b, tri.c, model.tau_min(), model.tau_max(), radius};
  }
  return table;
}

std::vector<StageConstraints> build_constraint_table(
    const DynamicsModel& model, const PathSpline& path,
    const DiscretizationGrid& grid, double radius) {
  std::vector<StageConstraints> table(grid.stage_count());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < grid.stage_count(); ++i) {
    const CoefficientTriple tri = nominal_coefficients(model, path, grid.s(i));
    table[i] = {tri.a, tri.b, tri.c, model.tau_min(), model.tau_max(), radius};
  }
  return table;
}

}  // namespace topt
