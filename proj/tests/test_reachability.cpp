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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "topt/dynamics.hpp"
#include "topt/geometry.hpp"
#include "topt/interval.hpp"
#include "topt/reachability.hpp"

namespace {

using topt::ControllableSets;
using topt::DiscretizationGrid;
using topt::Interval;
using topt::PathSpline;
using topt::Pendulum;
using topt::PlanarArm;
using topt::Profile;
using topt::StageConstraints;

constexpr double kInf = std::numeric_limits<double>::infinity();

double cone_lhs(double a, double radius, double m2, double u) {
  return a * u + radius * std::sqrt(u * u + m2);
}

StageConstraints single_joint(double a, double b, double c, double tau_min,
                              double tau_max, double radius) {
  StageConstraints sc;
  sc.a = Eigen::VectorXd::Constant(1, a);
  sc.b = Eigen::VectorXd::Constant(1, b);
  sc.c = Eigen::VectorXd::Constant(1, c);
  sc.tau_min = Eigen::VectorXd::Constant(1, tau_min);
  sc.tau_max = Eigen::VectorXd::Constant(1, tau_max);
  sc.radius = radius;
  return sc;
}

// Worst-case torque of joint j over the disturbance ball, by Cauchy-Schwarz
// attained at d = +-radius (u, x, 1) / ||(u, x, 1)||.
double worst_hi(const StageConstraints& sc, int j, double u, double x) {
  const double norm = std::sqrt(u * u + x * x + 1.0);
  return sc.a[j] * u + sc.b[j] * x + sc.c[j] + sc.radius * norm;
}

double worst_lo(const StageConstraints& sc, int j, double u, double x) {
  const double norm = std::sqrt(u * u + x * x + 1.0);
  return sc.a[j] * u + sc.b[j] * x + sc.c[j] - sc.radius * norm;
}

bool robust_feasible(const StageConstraints& sc, double u, double x,
                     double tol) {
  for (int j = 0; j < sc.a.size(); ++j) {
    if (worst_hi(sc, j, u, x) > sc.tau_max[j] + tol) return false;
    if (worst_lo(sc, j, u, x) < sc.tau_min[j] - tol) return false;
  }
  return true;
}

Pendulum integrator_model() {
  Pendulum::Params p;
  p.mass = 1.0;
  p.length = 1.0;
  p.inertia = 1.0;
  p.gravity = 0.0;
  p.tau_min = -0.9;
  p.tau_max = 0.9;
  return Pendulum(p);
}

Pendulum swing_model(double tau = 6.0) {
  Pendulum::Params p;
  p.mass = 1.0;
  p.length = 0.5;
  p.inertia = 0.3;
  p.gravity = 9.81;
  p.tau_min = -tau;
  p.tau_max = tau;
  return Pendulum(p);
}

PathSpline line_path() {
  const auto vec1 = [](double v) { return Eigen::VectorXd::Constant(1, v); };
  return PathSpline::interpolate({{0.0, vec1(0.0)}, {1.0, vec1(1.0)}});
}

PathSpline swing_path() {
  const auto vec1 = [](double v) { return Eigen::VectorXd::Constant(1, v); };
  return PathSpline::interpolate(
      {{0.0, vec1(-1.2)}, {0.5, vec1(0.3)}, {1.0, vec1(1.1)}});
}

// Exact recursion oracle for zero radius and a single joint with a > 0: all
// stage bounds are affine in x, so each controllable set is cut out by
// max-of-affine <= 0 whose endpoints are roots of one affine piece or domain
// edges.
Interval affine_one_step(const StageConstraints& sc, const Interval& target,
                         double delta, double x_max) {
  struct Affine {
    double slope, offset;
    double at(double x) const { return slope * x + offset; }
  };
  const double a = sc.a[0], b = sc.b[0], c = sc.c[0];
  REQUIRE(a > 0.0);
  const double inv = 1.0 / (2.0 * delta);
  const std::vector<Affine> lowers = {{-b / a, (sc.tau_min[0] - c) / a},
                                      {-inv, target.lo * inv}};
  const std::vector<Affine> uppers = {{-b / a, (sc.tau_max[0] - c) / a},
                                      {-inv, target.hi * inv}};
  const auto gap = [&](double x) {
    double worst = -kInf;
    for (const auto& l : lowers) {
      for (const auto& u : uppers) {
        worst = std::max(worst, l.at(x) - u.at(x));
      }
    }
    return worst;
  };
  std::vector<double> candidates = {0.0, x_max};
  for (const auto& l : lowers) {
    for (const auto& u : uppers) {
      const double slope = l.slope - u.slope;
      if (slope != 0.0) candidates.push_back((u.offset - l.offset) / slope);
    }
  }
  Interval out;
  for (double x : candidates) {
    if (x < 0.0 || x > x_max) continue;
    if (gap(x) > 1e-9) continue;
    out.lo = std::min(out.lo, x);
    out.hi = std::max(out.hi, x);
  }
  return out;
}

std::vector<Interval> affine_recursion(
    const std::vector<StageConstraints>& constraints,
    const DiscretizationGrid& grid, const Interval& terminal, double x_max) {
  std::vector<Interval> sets(grid.stage_count() + 1);
  sets.back() = terminal;
  for (int i = grid.stage_count() - 1; i >= 0; --i) {
    if (sets[i + 1].empty()) continue;
    sets[i] = affine_one_step(constraints[i], sets[i + 1], grid.delta(i), x_max);
  }
  return sets;
}

}  // namespace

TEST_CASE("cone_interval reduces to a linear bound at zero radius") {
  const Interval pos = topt::cone_interval(2.0, 0.0, 1.0, 10.0);
  CHECK(pos.lo == -kInf);
  CHECK(pos.hi == doctest::Approx(5.0).epsilon(1e-15));
  const Interval neg = topt::cone_interval(-2.0, 0.0, 1.0, 10.0);
  CHECK(neg.lo == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(neg.hi == kInf);
  CHECK(topt::cone_interval(0.0, 0.0, 1.0, -1.0).empty());
  CHECK(topt::cone_interval(0.0, 0.0, 1.0, 1.0).contains(1e9));
  CHECK_THROWS_AS(topt::cone_interval(1.0, -0.1, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(topt::cone_interval(1.0, 1.0, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("cone_interval bounded branch solves the quadratic exactly") {
  // radius > |a|: bounded interval.
  const double a = 1.0, r = 2.0, m2 = 1.0, beta = 10.0;
  const Interval iv = topt::cone_interval(a, r, m2, beta);
  REQUIRE(!iv.empty());
  CHECK(std::isfinite(iv.lo));
  CHECK(std::isfinite(iv.hi));
  CHECK(cone_lhs(a, r, m2, iv.lo) == doctest::Approx(beta).epsilon(1e-12));
  CHECK(cone_lhs(a, r, m2, iv.hi) == doctest::Approx(beta).epsilon(1e-12));
  CHECK(cone_lhs(a, r, m2, 0.5 * (iv.lo + iv.hi)) < beta);
  CHECK(cone_lhs(a, r, m2, iv.lo - 1e-6) > beta);
  CHECK(cone_lhs(a, r, m2, iv.hi + 1e-6) > beta);

  // Negative beta can never dominate the positive left-hand side minimum.
  CHECK(topt::cone_interval(a, r, m2, -0.1).empty());
  // The minimum of the left-hand side is sqrt(m2 (r^2 - a^2)) = sqrt(3).
  CHECK(topt::cone_interval(a, r, m2, std::sqrt(3.0) - 1e-6).empty());
  const Interval touch = topt::cone_interval(a, r, m2, std::sqrt(3.0) + 1e-9);
  CHECK(!touch.empty());
  CHECK(touch.width() < 1e-3);
}

TEST_CASE("cone_interval knife edge |a| == radius") {
  const Interval iv = topt::cone_interval(1.0, 1.0, 1.0, 10.0);
  CHECK(iv.lo == -kInf);
  CHECK(iv.hi == doctest::Approx(4.95).epsilon(1e-14));
  CHECK(cone_lhs(1.0, 1.0, 1.0, 4.95) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(cone_lhs(1.0, 1.0, 1.0, 4.96) > 10.0);
  CHECK(cone_lhs(1.0, 1.0, 1.0, -1e6) < 10.0);
  CHECK(topt::cone_interval(1.0, 1.0, 1.0, 0.0).empty());
  CHECK(topt::cone_interval(1.0, 1.0, 1.0, -5.0).empty());
  const Interval mirrored = topt::cone_interval(-1.0, 1.0, 1.0, 10.0);
  CHECK(mirrored.lo == doctest::Approx(-4.95).epsilon(1e-14));
  CHECK(mirrored.hi == kInf);
}

TEST_CASE("cone_interval dominant linear branch is never empty") {
  for (double beta : {10.0, 0.0, -10.0}) {
    const Interval iv = topt::cone_interval(2.0, 1.0, 1.0, beta);
    REQUIRE(!iv.empty());
    CHECK(iv.lo == -kInf);
    CHECK(std::isfinite(iv.hi));
    CHECK(cone_lhs(2.0, 1.0, 1.0, iv.hi) == doctest::Approx(beta).epsilon(1e-9));
    CHECK(cone_lhs(2.0, 1.0, 1.0, iv.hi + 1e-6) > beta);
    CHECK(cone_lhs(2.0, 1.0, 1.0, iv.hi - 1.0) < beta);
  }
}

TEST_CASE("cone_interval solution-set property on random instances") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> adist(-3.0, 3.0);
  std::uniform_real_distribution<double> rdist(0.0, 3.0);
  std::uniform_real_distribution<double> mdist(0.1, 10.0);
  std::uniform_real_distribution<double> bdist(-5.0, 15.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = adist(rng), r = rdist(rng), m2 = mdist(rng),
                 beta = bdist(rng);
    const Interval iv = topt::cone_interval(a, r, m2, beta);
    if (iv.empty()) {
      for (double u = -50.0; u <= 50.0; u += 1.0) {
        CHECK(cone_lhs(a, r, m2, u) > beta - 1e-9);
      }
      continue;
    }
    const double inner =
        std::isfinite(iv.lo)
            ? (std::isfinite(iv.hi) ? 0.5 * (iv.lo + iv.hi) : iv.lo + 1.0)
            : (std::isfinite(iv.hi) ? iv.hi - 1.0 : 0.0);
    CHECK(cone_lhs(a, r, m2, inner) <= beta + 1e-7);
    if (std::isfinite(iv.lo)) {
      CHECK(cone_lhs(a, r, m2, iv.lo) <= beta + 1e-7);
      CHECK(cone_lhs(a, r, m2, iv.lo - 1e-5) >= beta - 1e-9);
    }
    if (std::isfinite(iv.hi)) {
      CHECK(cone_lhs(a, r, m2, iv.hi) <= beta + 1e-7);
      CHECK(cone_lhs(a, r, m2, iv.hi + 1e-5) >= beta - 1e-9);
    }
  }
}

TEST_CASE("robust_u_interval is sound against sampled disturbances") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coeff(-3.0, 3.0);
  std::uniform_real_distribution<double> xdist(0.0, 4.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int nonempty = 0;
  for (int trial = 0; trial < 60; ++trial) {
    StageConstraints sc;
    sc.a = Eigen::Vector2d(coeff(rng), coeff(rng));
    sc.b = Eigen::Vector2d(coeff(rng), coeff(rng));
    sc.c = Eigen::Vector2d(coeff(rng), coeff(rng));
    sc.tau_min = Eigen::Vector2d(-4.0, -3.0);
    sc.tau_max = Eigen::Vector2d(4.0, 3.0);
    sc.radius = (trial % 2 == 0) ? 0.3 : 1.0;
    const double x = xdist(rng);
    const Interval u_int = topt::robust_u_interval(sc, x);
    if (u_int.empty()) continue;
    ++nonempty;
    std::vector<double> probes;
    if (std::isfinite(u_int.lo)) probes.push_back(u_int.lo);
    if (std::isfinite(u_int.hi)) probes.push_back(u_int.hi);
    probes.push_back(u_int.clamp(0.0));
    for (double u : probes) {
      CHECK(robust_feasible(sc, u, x, 1e-9));
      // Sampled disturbances within the per-joint coefficient ball can only
      // be milder than the analytic worst case.
      for (int k = 0; k < 100; ++k) {
        Eigen::Vector3d d(gauss(rng), gauss(rng), gauss(rng));
        d *= sc.radius / std::max(d.norm(), 1e-12);
        for (int j = 0; j < 2; ++j) {
          const double tau = (sc.a[j] + d[0]) * u + (sc.b[j] + d[1]) * x +
                             sc.c[j] + d[2];
          CHECK(tau <= sc.tau_max[j] + 1e-9);
          CHECK(tau >= sc.tau_min[j] - 1e-9);
        }
      }
    }
    // Tightness just beyond finite endpoints.
    if (std::isfinite(u_int.lo)) {
      CHECK(!robust_feasible(sc, u_int.lo - 1e-6, x, 0.0));
    }
    if (std::isfinite(u_int.hi)) {
      CHECK(!robust_feasible(sc, u_int.hi + 1e-6, x, 0.0));
    }
  }
  CHECK(nonempty > 10);
}

TEST_CASE("robust_u_interval matches a brute-force scan") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    StageConstraints sc;
    sc.a = Eigen::Vector2d(coeff(rng), coeff(rng));
    sc.b = Eigen::Vector2d(coeff(rng), coeff(rng));
    sc.c = Eigen::Vector2d(coeff(rng), coeff(rng));
    sc.tau_min = Eigen::Vector2d(-3.0, -2.5);
    sc.tau_max = Eigen::Vector2d(3.0, 2.5);
    sc.radius = 0.4;
    const double x = 0.8;
    const Interval u_int = topt::robust_u_interval(sc, x);
    const double step = 1e-2;
    double scan_lo = kInf, scan_hi = -kInf;
    for (double u = -20.0; u <= 20.0; u += step) {
      if (robust_feasible(sc, u, x, 0.0)) {
        scan_lo = std::min(scan_lo, u);
        scan_hi = std::max(scan_hi, u);
      }
    }
    if (u_int.empty()) {
      CHECK(scan_lo == kInf);
      continue;
    }
    REQUIRE(scan_lo < kInf);
    CHECK(std::abs(std::max(u_int.lo, -20.0) - scan_lo) <= step + 1e-9);
    CHECK(std::abs(std::min(u_int.hi, 20.0) - scan_hi) <= step + 1e-9);
  }
}

TEST_CASE("robust_u_interval nests as the radius grows") {
  StageConstraints sc = single_joint(1.2, -0.8, 0.4, -2.5, 2.5, 0.0);
  for (double x : {0.0, 0.7, 2.0}) {
    Interval previous = Interval::whole();
    for (double r : {0.0, 0.3, 0.6, 0.9}) {
      sc.radius = r;
      const Interval iv = topt::robust_u_interval(sc, x);
      CHECK(previous.contains(iv, 1e-12));
      previous = iv;
    }
  }
}

TEST_CASE("robust_x_domain excludes states with an empty per-joint row") {
  // |a| <= radius, so the row restricts x.
  StageConstraints sc = single_joint(0.3, 2.0, 1.0, -4.0, 4.0, 0.5);
  const Interval domain = topt::robust_x_domain(sc);
  REQUIRE(!domain.empty());
  CHECK(std::isfinite(domain.hi));
  for (double x = std::max(domain.lo, 0.0) + 1e-4; x < domain.hi - 1e-4;
       x += domain.width() / 23.0) {
    CHECK(!topt::robust_u_interval(sc, x).empty());
  }
  CHECK(topt::robust_u_interval(sc, domain.hi + 1e-4).empty());

  // |a| > radius: the row never restricts x.
  const StageConstraints wide = single_joint(2.0, 2.0, 1.0, -4.0, 4.0, 0.5);
  const Interval unrestricted = topt::robust_x_domain(wide);
  CHECK(unrestricted.lo == -kInf);
  CHECK(unrestricted.hi == kInf);
}

TEST_CASE("one-step set closed forms") {
  const StageConstraints sc = single_joint(1.0, 0.0, 0.0, -1.0, 1.0, 0.0);
  const Interval q0 = topt::robust_one_step_set(sc, Interval::point(0.0), 0.5,
                                                10.0);
  CHECK(q0.lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q0.hi == doctest::Approx(1.0).epsilon(1e-6));

  const Interval q1 = topt::robust_one_step_set(sc, Interval::point(0.5), 0.5,
                                                10.0);
  CHECK(q1.lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q1.hi == doctest::Approx(1.5).epsilon(1e-6));

  CHECK(topt::robust_one_step_set(sc, Interval{}, 0.5, 10.0).empty());
  CHECK_THROWS_AS(
      topt::robust_one_step_set(sc, Interval::point(0.0), 0.0, 10.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      topt::robust_one_step_set(sc, Interval::point(0.0), 0.5, 0.0),
      std::invalid_argument);
}

TEST_CASE("one-step set matches a brute-force grid") {
  const StageConstraints sc = single_joint(1.2, -0.8, 0.4, -2.5, 2.5, 0.6);
  const Interval target{0.3, 0.8};
  const double delta = 0.02, x_max = 5.0;
  const Interval q = topt::robust_one_step_set(sc, target, delta, x_max);

  const double dx = 1e-3;
  double scan_lo = kInf, scan_hi = -kInf;
  for (double x = 0.0; x <= x_max + 1e-12; x += dx) {
    const double u_lo = (target.lo - x) / (2.0 * delta);
    const double u_hi = (target.hi - x) / (2.0 * delta);
    bool feasible = false;
    const double du = (u_hi - u_lo) / 2000.0;
    for (double u = u_lo; u <= u_hi + 1e-12; u += du) {
      if (robust_feasible(sc, u, x, 0.0)) {
        feasible = true;
        break;
      }
    }
    if (feasible) {
      scan_lo = std::min(scan_lo, x);
      scan_hi = std::max(scan_hi, x);
    }
  }
  REQUIRE(!q.empty());
  REQUIRE(scan_lo < kInf);
  CHECK(std::abs(q.lo - scan_lo) <= 2e-3);
  CHECK(std::abs(q.hi - scan_hi) <= 2e-3);
}

TEST_CASE("controllable sets of the double integrator match the closed form") {
  const Pendulum model = integrator_model();
  const PathSpline path = line_path();
  const DiscretizationGrid grid(100);
  const auto table = topt::build_constraint_table(model, path, grid, 0.0);
  const ControllableSets sets =
      topt::compute_controllable_sets(table, grid, Interval::point(0.0), 2.0);
  REQUIRE(sets.feasible());
  CHECK(sets.sets.back().lo == 0.0);
  CHECK(sets.sets.back().hi == 0.0);
  for (int i = 0; i <= grid.stage_count(); ++i) {
    const double expected = 1.8 * (1.0 - grid.s(i));
    CHECK(sets.sets[i].lo == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sets.sets[i].hi == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("controllable sets match the exact affine oracle at zero radius") {
  const Pendulum model = swing_model();
  const PathSpline path = swing_path();
  const DiscretizationGrid grid(40);
  const auto table = topt::build_constraint_table(model, path, grid, 0.0);
  const double x_max = 25.0;
  const ControllableSets sets =
      topt::compute_controllable_sets(table, grid, Interval::point(0.0), x_max);
  const std::vector<Interval> oracle =
      affine_recursion(table, grid, Interval::point(0.0), x_max);
  REQUIRE(sets.feasible());
  for (int i = 0; i <= grid.stage_count(); ++i) {
    REQUIRE(!oracle[i].empty());
    CHECK(std::abs(sets.sets[i].lo - oracle[i].lo) < 2e-6);
    CHECK(std::abs(sets.sets[i].hi - oracle[i].hi) < 2e-6);
  }
}

TEST_CASE("controllable sets agree with a grid DP oracle at positive radius") {
  const Pendulum model = swing_model();
  const PathSpline path = swing_path();
  const DiscretizationGrid grid(20);
  const double radius = 0.4, x_max = 25.0;
  const auto table = topt::build_constraint_table(model, path, grid, radius);
  const ControllableSets sets = topt::compute_controllable_sets(
      table, grid, Interval::point(0.0), x_max);
  REQUIRE(sets.feasible());

  const int cells = 25000;
  const double dx = x_max / cells;
  Interval dp = Interval::point(0.0);
  for (int i = grid.stage_count() - 1; i >= 0; --i) {
    const double inv = 1.0 / (2.0 * grid.delta(i));
    Interval next;
    for (int k = 0; k <= cells; ++k) {
      const double x = k * dx;
      const Interval u = topt::robust_u_interval(table[i], x);
      if (u.empty()) continue;
      const double lo = std::max(u.lo, (dp.lo - x) * inv);
      const double hi = std::min(u.hi, (dp.hi - x) * inv);
      if (lo > hi) continue;
      next.lo = std::min(next.lo, x);
      next.hi = std::max(next.hi, x);
    }
    REQUIRE(!next.empty());
    dp = next;
    // The DP scan snaps endpoints to its grid, so allow one-sided slack that
    // accumulates across stages.
    const double slack = (grid.stage_count() - i) * dx + 1e-6;
    CHECK(sets.sets[i].lo <= dp.lo + 1e-6);
    CHECK(sets.sets[i].lo >= dp.lo - slack);
    CHECK(sets.sets[i].hi >= dp.hi - 1e-6);
    CHECK(sets.sets[i].hi <= dp.hi + slack);
  }
}

TEST_CASE("infeasibility is flagged and propagated") {
  // Forced acceleration can never return to rest.
  const StageConstraints sc = single_joint(1.0, 0.0, 0.0, 6.0, 8.0, 0.0);
  const DiscretizationGrid grid(10);
  const std::vector<StageConstraints> table(10, sc);
  const ControllableSets sets =
      topt::compute_controllable_sets(table, grid, Interval::point(0.0), 5.0);
  CHECK(!sets.feasible());
  CHECK(sets.first_empty_stage == 9);
  CHECK(sets.sets[10].contains(0.0));
  for (int i = 0; i <= 9; ++i) CHECK(sets.sets[i].empty());
  CHECK_THROWS_AS(topt::solve_time_optimal_profile(table, grid, sets, 0.0),
                  std::invalid_argument);
}

TEST_CASE("recursion input validation") {
  const StageConstraints sc = single_joint(1.0, 0.0, 0.0, -1.0, 1.0, 0.0);
  const DiscretizationGrid grid(10);
  const std::vector<StageConstraints> short_table(9, sc);
  CHECK_THROWS_AS(topt::compute_controllable_sets(short_table, grid,
                                                  Interval::point(0.0), 5.0),
                  std::invalid_argument);
  const std::vector<StageConstraints> table(10, sc);
  CHECK_THROWS_AS(
      topt::compute_controllable_sets(table, grid, Interval{-1.0, 0.0}, 5.0),
      std::invalid_argument);
  CHECK_THROWS_AS(DiscretizationGrid(0), std::invalid_argument);
}

TEST_CASE("nonzero terminal window survives the recursion") {
  const Pendulum model = swing_model();
  const PathSpline path = swing_path();
  const DiscretizationGrid grid(50);
  const auto table = topt::build_constraint_table(model, path, grid, 0.2);
  const Interval terminal{0.0, 0.09};
  const ControllableSets sets =
      topt::compute_controllable_sets(table, grid, terminal, 25.0);
  REQUIRE(sets.feasible());
  CHECK(sets.sets.back().lo == terminal.lo);
  CHECK(sets.sets.back().hi == terminal.hi);
  const ControllableSets tight = topt::compute_controllable_sets(
      table, grid, Interval::point(0.0), 25.0);
  REQUIRE(tight.feasible());
  // The terminal window contains the point target, so every controllable set
  // must contain its point-target counterpart.
  for (size_t i = 0; i + 1 < sets.sets.size(); ++i) {
    CHECK(sets.sets[i].contains(tight.sets[i], 1e-7));
  }
}

TEST_CASE("controllable sets and durations are monotone in the radius") {
  const Pendulum model = swing_model();
  const PathSpline path = swing_path();
  const DiscretizationGrid grid(60);
  std::vector<Interval> previous;
  double previous_duration = -1.0;
  for (double radius : {0.0, 0.25, 0.5}) {
    const auto table = topt::build_constraint_table(model, path, grid, radius);
    const ControllableSets sets = topt::compute_controllable_sets(
        table, grid, Interval::point(0.0), 25.0);
    REQUIRE(sets.feasible());
    if (!previous.empty()) {
      for (size_t i = 0; i < sets.sets.size(); ++i) {
        CHECK(previous[i].contains(sets.sets[i], 1e-9));
      }
    }
    previous = sets.sets;
    const Profile profile =
        topt::solve_time_optimal_profile(table, grid, sets, 0.0);
    if (previous_duration >= 0.0) {
      CHECK(profile.duration >= previous_duration - 1e-9);
    }
    previous_duration = profile.duration;
  }
}

TEST_CASE("one-step set finds a feasible sliver at the domain edge") {
  // Coupled two-joint stage where only a narrow band of x near zero is
  // feasible: the second row has |a| slightly above the radius, so the row
  // never restricts the x-domain and the search must certify the sliver by
  // sign rather than trust gap magnitudes from empty u-intervals.
  StageConstraints sc;
  sc.a = Eigen::Vector2d(1.2300, 0.2596);
  sc.b = Eigen::Vector2d(7.5787, 2.0738);
  sc.c = Eigen::Vector2d(12.3539, 2.0667);
  sc.tau_min = Eigen::Vector2d(-25.0, -6.0);
  sc.tau_max = Eigen::Vector2d(25.0, 6.0);
  sc.radius = 0.25;
  const Interval target{0.0, 2.346621};
  const double delta = 0.01;

  const Interval set = topt::robust_one_step_set(sc, target, delta, 100.0);
  REQUIRE(!set.empty());
  CHECK(set.contains(0.0));

  // Brute-force the feasibility edge: largest scanned x with a nonempty
  // intersection of the robust u-interval and the transition window.
  double edge = 0.0;
  for (int k = 0; k <= 200000; ++k) {
    const double x = 5.0 * k / 200000;
    const Interval u = topt::robust_u_interval(sc, x);
    const double lo = std::max(u.lo, (target.lo - x) / (2.0 * delta));
    const double hi = std::min(u.hi, (target.hi - x) / (2.0 * delta));
    if (lo <= hi) edge = x;
  }
  CHECK(set.hi == doctest::Approx(edge).epsilon(1e-3));
  CHECK(set.hi <= edge + 1e-6);
}

TEST_CASE("wider torque bounds cannot slow the optimal profile") {
  const PathSpline path = swing_path();
  const DiscretizationGrid grid(60);
  double previous = kInf;
  for (double tau : {5.0, 6.0, 9.0}) {
    const Pendulum model = swing_model(tau);
    const auto table = topt::build_constraint_table(model, path, grid, 0.0);
    const ControllableSets sets = topt::compute_controllable_sets(
        table, grid, Interval::point(0.0), 25.0);
    REQUIRE(sets.feasible());
    const Profile profile =
        topt::solve_time_optimal_profile(table, grid, sets, 0.0);
    CHECK(profile.duration <= previous + 1e-9);
    previous = profile.duration;
  }
}

TEST_CASE("set endpoints are stable under grid refinement") {
  const Pendulum model = swing_model();
  const PathSpline path = swing_path();
  double coarse_hi = 0.0, fine_hi = 0.0;
  double coarse_duration = 0.0, fine_duration = 0.0;
  for (int n : {100, 200}) {
    const DiscretizationGrid grid(n);
    const auto table = topt::build_constraint_table(model, path, grid, 0.3);
    const ControllableSets sets = topt::compute_controllable_sets(
        table, grid, Interval::point(0.0), 25.0);
    REQUIRE(sets.feasible());
    const Profile profile =
        topt::solve_time_optimal_profile(table, grid, sets, 0.0);
    (n == 100 ? coarse_hi : fine_hi) = sets.sets[n / 2].hi;
    (n == 100 ? coarse_duration : fine_duration) = profile.duration;
  }
  CHECK(std::abs(coarse_hi - fine_hi) / fine_hi < 0.05);
  CHECK(std::abs(coarse_duration - fine_duration) / fine_duration < 0.05);
}

TEST_CASE("greedy profile reproduces the bang-bang double integrator") {
  const Pendulum model = integrator_model();
  const PathSpline path = line_path();
  const DiscretizationGrid grid(100);
  const auto table = topt::build_constraint_table(model, path, grid, 0.0);
  const ControllableSets sets =
      topt::compute_controllable_sets(table, grid, Interval::point(0.0), 2.0);
  REQUIRE(sets.feasible());
  const Profile profile =
      topt::solve_time_optimal_profile(table, grid, sets, 0.0);
  CHECK(profile.duration ==
        doctest::Approx(2.0 / std::sqrt(0.9)).epsilon(1e-5));
  for (int i = 0; i <= grid.stage_count(); ++i) {
    const double s = grid.s(i);
    CHECK(profile.x[i] ==
          doctest::Approx(1.8 * std::min(s, 1.0 - s)).epsilon(1e-5));
  }
  for (int i = 0; i < grid.stage_count(); ++i) {
    CHECK(std::abs(profile.u[i]) == doctest::Approx(0.9).epsilon(1e-4));
    // Transition identity and set membership along the pass.
    CHECK(profile.x[i + 1] ==
          doctest::Approx(topt::transition(profile.x[i], profile.u[i],
                                           grid.delta(i)))
              .epsilon(1e-9));
    CHECK(sets.sets[i].contains(profile.x[i], 1e-12));
  }
  CHECK(profile.duration ==
        doctest::Approx(topt::profile_duration(profile, grid)).epsilon(1e-15));
  CHECK_THROWS_AS(topt::solve_time_optimal_profile(table, grid, sets, 1.9),
                  std::invalid_argument);
}

TEST_CASE("profile interpolation is piecewise linear in x and constant in u") {
  Profile profile;
  profile.x = {0.0, 0.2, 0.6, 0.3, 0.3};
  profile.u = {0.4, 0.8, -0.6, 0.0};
  const DiscretizationGrid grid(4);
  CHECK(topt::profile_x_at(profile, grid, 0.125) ==
        doctest::Approx(0.1).epsilon(1e-15));
  CHECK(topt::profile_x_at(profile, grid, 0.5) ==
        doctest::Approx(0.6).epsilon(1e-15));
  CHECK(topt::profile_x_at(profile, grid, 1.0) ==
        doctest::Approx(0.3).epsilon(1e-15));
  CHECK(topt::profile_u_at(profile, grid, 0.74) == -0.6);
  CHECK(topt::profile_u_at(profile, grid, 0.75) == 0.0);
  CHECK(topt::profile_u_at(profile, grid, 1.0) == 0.0);
  CHECK(grid.stage_of(-0.2) == 0);
  CHECK(grid.stage_of(1.0) == 3);
}

TEST_CASE("serial and parallel constraint tables are bitwise identical") {
  PlanarArm::Params p;
  p.m1 = 2.5;
  p.m2 = 1.5;
  p.l1 = 0.4;
  p.l2 = 0.35;
  p.lc1 = 0.2;
  p.lc2 = 0.175;
  p.i1 = 0.0333;
  p.i2 = 0.0153;
  p.gravity = 9.81;
  p.tau_min = Eigen::Vector2d(-25.0, -9.0);
  p.tau_max = Eigen::Vector2d(25.0, 9.0);
  const PlanarArm arm(p);
  const auto vec2 = [](double a, double b) { return Eigen::Vector2d(a, b); };
  const PathSpline path = PathSpline::interpolate({{0.0, vec2(-1.3, 0.5)},
                                                   {0.35, vec2(-0.6, 1.2)},
                                                   {0.7, vec2(0.3, 0.4)},
                                                   {1.0, vec2(0.9, -0.4)}});
  const DiscretizationGrid grid(5000);
  const auto serial = topt::build_constraint_table_serial(arm, path, grid, 0.5);
  const auto parallel = topt::build_constraint_table(arm, path, grid, 0.5);
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK((serial[i].a.array() == parallel[i].a.array()).all());
    CHECK((serial[i].b.array() == parallel[i].b.array()).all());
    CHECK((serial[i].c.array() == parallel[i].c.array()).all());
    CHECK(serial[i].radius == parallel[i].radius);
  }
}
