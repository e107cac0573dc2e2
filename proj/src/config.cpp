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

#include "topt/config.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace topt {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json parse_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot open " + file.string());
  }
  try {
    return json::parse(in);
  } catch (const std::exception& ex) {
    throw std::runtime_error(file.string() + ": " + ex.what());
  }
}

Eigen::VectorXd to_vector(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t k = 0; k < j.size(); ++k) v[k] = j.at(k).get<double>();
  return v;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::ofstream open_output(const fs::path& file) {
  if (!file.parent_path().empty()) {
    fs::create_directories(file.parent_path());
  }
  std::ofstream out(file);
  if (!out) {
    throw std::runtime_error("cannot write " + file.string());
  }
  out << std::setprecision(17);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& file,
                                               const std::string& expect_prefix) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot open " + file.string());
  }
  std::string header;
  if (!std::getline(in, header) || header.rfind(expect_prefix, 0) != 0) {
    throw std::runtime_error(file.string() + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

// Deterministic standard normals from raw generator bits (independent of the
// standard library's distribution implementations).
double draw_normal(std::mt19937_64& rng) {
  while (true) {
    const double u1 = (rng() >> 11) * 0x1.0p-53;
    const double u2 = (rng() >> 11) * 0x1.0p-53;
    if (u1 <= 0.0) continue;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  if (stages < 2) throw std::invalid_argument("stages must be >= 2");
  if (radius < 0.0) throw std::invalid_argument("radius must be >= 0");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be > 0");
  if (initial_error_norm < 0.0) {
    throw std::invalid_argument("initial error norm must be >= 0");
  }
  if (!terminal_sd.empty() && terminal_sd.lo < 0.0) {
    throw std::invalid_argument("terminal velocity set must lie in sd >= 0");
  }
  if (!(dt_control > 0.0) || !(x_max > 0.0) || !(plant_mass_scale > 0.0) ||
      !(max_time > 0.0) || !(divergence_guard > 0.0)) {
    throw std::invalid_argument("scenario timing/bound fields must be positive");
  }
  if (modes.empty()) throw std::invalid_argument("no controller modes listed");
}

ControlMode mode_from_string(const std::string& name) {
  if (name == "topt") return ControlMode::kTopt;
  if (name == "os") return ControlMode::kOs;
  if (name == "tt") return ControlMode::kTt;
  throw std::invalid_argument("unknown controller mode: " + name);
}

std::string to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::kTopt:
      return "topt";
    case ControlMode::kOs:
      return "os";
    case ControlMode::kTt:
      return "tt";
  }
  return "unknown";
}

std::unique_ptr<DynamicsModel> load_robot(const fs::path& file) {
  const json j = parse_file(file);
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "pendulum") {
      Pendulum::Params p;
      p.mass = j.at("mass").get<double>();
      p.length = j.at("length").get<double>();
      p.inertia = j.at("inertia").get<double>();
      p.gravity = j.at("gravity").get<double>();
      p.tau_min = j.at("tau_min").get<double>();
      p.tau_max = j.at("tau_max").get<double>();
      return std::make_unique<Pendulum>(p);
    }
    if (type == "planar_arm") {
      PlanarArm::Params p;
      p.m1 = j.at("m1").get<double>();
      p.m2 = j.at("m2").get<double>();
      p.l1 = j.at("l1").get<double>();
      p.l2 = j.at("l2").get<double>();
      p.lc1 = j.at("lc1").get<double>();
      p.lc2 = j.at("lc2").get<double>();
      p.i1 = j.at("i1").get<double>();
      p.i2 = j.at("i2").get<double>();
      p.gravity = j.at("gravity").get<double>();
      p.tau_min = to_vector(j.at("tau_min"));
      p.tau_max = to_vector(j.at("tau_max"));
      return std::make_unique<PlanarArm>(p);
    }
    throw std::invalid_argument("unknown robot type: " + type);
  } catch (const json::exception& ex) {
    throw std::runtime_error(file.string() + ": " + ex.what());
  }
}

PathSpline load_path(const fs::path& file) {
  const json j = parse_file(file);
  try {
    std::vector<Waypoint> waypoints;
    for (const json& w : j.at("waypoints")) {
      waypoints.push_back({w.at("s").get<double>(), to_vector(w.at("q"))});
    }
    return PathSpline::interpolate(waypoints);
  } catch (const json::exception& ex) {
    throw std::runtime_error(file.string() + ": " + ex.what());
  }
}

ScenarioConfig load_scenario(const fs::path& file) {
  const json j = parse_file(file);
  ScenarioConfig cfg;
  try {
    const fs::path base = file.parent_path();
    cfg.robot_file = base / j.at("robot").get<std::string>();
    cfg.path_file = base / j.at("path").get<std::string>();
    cfg.stages = j.value("stages", cfg.stages);
    cfg.radius = j.value("radius", cfg.radius);
    cfg.omega = j.value("omega", cfg.omega);
    if (j.contains("terminal")) {
      const json& t = j.at("terminal");
      cfg.terminal_sd = {t.at(0).get<double>(), t.at(1).get<double>()};
    }
    cfg.initial_error_norm =
        j.value("initial_error_norm", cfg.initial_error_norm);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("modes")) {
      cfg.modes.clear();
      for (const json& m : j.at("modes")) {
        cfg.modes.push_back(mode_from_string(m.get<std::string>()));
      }
    }
    cfg.out_dir = j.value("out_dir", cfg.out_dir.string());
    cfg.dt_control = j.value("dt_control", cfg.dt_control);
    cfg.x_max = j.value("x_max", cfg.x_max);
    cfg.plant_mass_scale = j.value("plant_mass_scale", cfg.plant_mass_scale);
    cfg.max_time = j.value("max_time", cfg.max_time);
    cfg.divergence_guard = j.value("divergence_guard", cfg.divergence_guard);
    cfg.calibrated_rbar = j.value("calibrated_rbar", cfg.calibrated_rbar);
  } catch (const json::exception& ex) {
    throw std::runtime_error(file.string() + ": " + ex.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioArtifacts prepare_scenario(const ScenarioConfig& config) {
  ScenarioArtifacts art;
  art.model = load_robot(config.robot_file);
  art.plant = config.plant_mass_scale == 1.0
                  ? load_robot(config.robot_file)
                  : art.model->with_mass_scale(config.plant_mass_scale);
  art.path = load_path(config.path_file);
  if (art.path.joint_count() != art.model->joint_count()) {
    throw std::runtime_error("path and robot joint counts differ");
  }
  art.grid = DiscretizationGrid(config.stages);

  const Interval terminal{config.terminal_sd.lo * config.terminal_sd.lo,
                          config.terminal_sd.hi * config.terminal_sd.hi};
  double t0 = now_seconds();
  art.constraints =
      build_constraint_table(*art.model, art.path, art.grid, config.radius);
  art.coefficient_seconds = now_seconds() - t0;
  t0 = now_seconds();
  art.sets = compute_controllable_sets(art.constraints, art.grid, terminal,
                                       config.x_max);
  art.recursion_seconds = now_seconds() - t0;

  if (config.radius == 0.0) {
    art.nominal_constraints = art.constraints;
    art.nominal_sets = art.sets;
  } else {
    art.nominal_constraints =
        build_constraint_table(*art.model, art.path, art.grid, 0.0);
    art.nominal_sets = compute_controllable_sets(art.nominal_constraints,
                                                 art.grid, terminal,
                                                 config.x_max);
  }
  if (art.nominal_sets.feasible() && art.nominal_sets.sets[0].contains(0.0)) {
    art.nominal_profile = solve_time_optimal_profile(
        art.nominal_constraints, art.grid, art.nominal_sets, 0.0);
  }
  return art;
}

CoupledState initial_state(const ScenarioConfig& config, const PathSpline& path,
                           std::uint64_t seed) {
  const int n = path.joint_count();
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
  if (config.initial_error_norm > 0.0) {
    std::mt19937_64 rng(seed);
    Eigen::VectorXd dir(n);
    do {
      for (int j = 0; j < n; ++j) dir[j] = draw_normal(rng);
    } while (dir.norm() < 1e-12);
    e0 = config.initial_error_norm * dir / dir.norm();
  }
  CoupledState y0;
  y0.q = path.position(0.0) - e0;
  y0.qd = Eigen::VectorXd::Zero(n);
  y0.s = 0.0;
  y0.sd = 0.0;
  return y0;
}

SimResult run_mode(const ScenarioArtifacts& art, const ScenarioConfig& config,
                   ControlMode mode, std::uint64_t seed) {
  const TrackingGains gains =
      TrackingGains::critically_damped(art.model->joint_count(), config.omega);
  if (mode == ControlMode::kTopt && !art.sets.feasible()) {
    throw std::invalid_argument("robust sets are infeasible");
  }
  if (mode != ControlMode::kTopt && art.nominal_profile.x.empty()) {
    throw std::invalid_argument("nominal profile unavailable");
  }

  PathTrackingController controller =
      mode == ControlMode::kTopt
          ? PathTrackingController::topt(*art.model, art.path, art.grid,
                                         art.sets, gains)
          : mode == ControlMode::kOs
                ? PathTrackingController::os(*art.model, art.path, art.grid,
                                             art.nominal_profile, gains)
                : PathTrackingController::tt(
                      *art.model, art.path,
                      TimedReference(art.nominal_profile, art.grid), gains);

  SimParams params;
  params.dt_control = config.dt_control;
  params.divergence_guard = config.divergence_guard;
  params.max_time = config.max_time;
  params.terminal_sd = config.terminal_sd;
  return simulate(*art.plant, art.path, controller,
                  initial_state(config, art.path, seed), params);
}

void write_sets_csv(const fs::path& file, const DiscretizationGrid& grid,
                    const ControllableSets& sets) {
  std::ofstream out = open_output(file);
  out << "stage,s,K_lo,K_hi\n";
  for (size_t i = 0; i < sets.sets.size(); ++i) {
    out << i << ',' << grid.s(static_cast<int>(i)) << ',' << sets.sets[i].lo
        << ',' << sets.sets[i].hi << '\n';
  }
}

std::vector<SetsRow> read_sets_csv(const fs::path& file) {
  std::vector<SetsRow> rows;
  for (const auto& fields : read_csv(file, "stage,")) {
    if (fields.size() != 4) {
      throw std::runtime_error(file.string() + ": bad sets row");
    }
    rows.push_back({std::stoi(fields[0]), std::stod(fields[1]),
                    std::stod(fields[2]), std::stod(fields[3])});
  }
  return rows;
}

void write_telemetry_csv(const fs::path& file, const SimResult& result) {
  std::ofstream out = open_output(file);
  const size_t n = result.tau.empty() ? 0 : result.tau.front().size();
  out << "t,s,x,u";
  for (size_t j = 1; j <= n; ++j) out << ",tau" << j;
  out << ",err_norm,infeasible_flag\n";
  for (size_t k = 0; k < result.t.size(); ++k) {
    out << result.t[k] << ',' << result.s[k] << ',' << result.x[k] << ','
        << result.u[k];
    for (size_t j = 0; j < n; ++j) out << ',' << result.tau[k][j];
    out << ',' << result.err_pos[k] << ','
        << static_cast<int>(result.infeasible[k]) << '\n';
  }
}

TelemetryData read_telemetry_csv(const fs::path& file) {
  TelemetryData data;
  for (const auto& fields : read_csv(file, "t,")) {
    if (fields.size() < 6) {
      throw std::runtime_error(file.string() + ": bad telemetry row");
    }
    const size_t n = fields.size() - 6;
    data.t.push_back(std::stod(fields[0]));
    data.s.push_back(std::stod(fields[1]));
    data.x.push_back(std::stod(fields[2]));
    data.u.push_back(std::stod(fields[3]));
    std::vector<double> tau(n);
    for (size_t j = 0; j < n; ++j) tau[j] = std::stod(fields[4 + j]);
    data.tau.push_back(std::move(tau));
    data.err_norm.push_back(std::stod(fields[fields.size() - 2]));
    data.infeasible.push_back(std::stoi(fields.back()));
  }
  return data;
}

void write_summary_json(const fs::path& file, const SimResult& result,
                        double nominal_duration) {
  json j;
  j["status"] = to_string(result.status);
  j["duration"] = result.duration;
  j["max_err_pos"] = result.max_err_pos;
  j["terminal_sd"] = result.terminal_sd;
  j["infeasible_count"] = result.infeasible_count;
  j["excursion_count"] = result.excursion_count;
  j["nominal_duration"] = nominal_duration;
  std::ofstream out = open_output(file);
  out << j.dump(2) << '\n';
}

RunSummary read_summary_json(const fs::path& file) {
  const json j = parse_file(file);
  RunSummary s;
  try {
    s.status = j.at("status").get<std::string>();
    s.duration = j.at("duration").get<double>();
    s.max_err_pos = j.at("max_err_pos").get<double>();
    s.terminal_sd = j.at("terminal_sd").get<double>();
    s.infeasible_count = j.at("infeasible_count").get<int>();
    s.excursion_count = j.at("excursion_count").get<int>();
    s.nominal_duration = j.at("nominal_duration").get<double>();
  } catch (const json::exception& ex) {
    throw std::runtime_error(file.string() + ": " + ex.what());
  }
  return s;
}

void write_comparison_csv(const fs::path& file,
                          const std::vector<ComparisonRow>& rows) {
  std::ofstream out = open_output(file);
  out << "mode,status,max_err_pos,duration,infeasible_count,nominal_duration\n";
  for (const ComparisonRow& r : rows) {
    out << r.mode << ',' << r.status << ',' << r.max_err_pos << ','
        << r.duration << ',' << r.infeasible_count << ','
        << r.nominal_duration << '\n';
  }
}

std::vector<ComparisonRow> read_comparison_csv(const fs::path& file) {
  std::vector<ComparisonRow> rows;
  for (const auto& fields : read_csv(file, "mode,")) {
    if (fields.size() != 6) {
      throw std::runtime_error(file.string() + ": bad comparison row");
    }
    rows.push_back({fields[0], fields[1], std::stod(fields[2]),
                    std::stod(fields[3]), std::stoi(fields[4]),
                    std::stod(fields[5])});
  }
  return rows;
}

}  // namespace topt
