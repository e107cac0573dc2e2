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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "topt/control.hpp"
#include "topt/dynamics.hpp"
#include "topt/geometry.hpp"
#include "topt/reachability.hpp"
#include "topt/sim.hpp"

namespace topt {

/// Experiment description. Robot and path entries are file paths resolved
/// relative to the scenario file's directory.
struct ScenarioConfig {
  std::filesystem::path robot_file;
  std::filesystem::path path_file;
  int stages = 100;
  double radius = 0.5;
  double omega = 20.0;
  Interval terminal_sd{0.0, 0.0};
  double initial_error_norm = 0.0;
  std::uint64_t seed = 0;
  std::vector<ControlMode> modes{ControlMode::kTopt, ControlMode::kOs,
                                 ControlMode::kTt};
  std::filesystem::path out_dir = "out";
  double dt_control = 1e-3;
  double x_max = 100.0;
  double plant_mass_scale = 1.0;
  double max_time = 30.0;
  double divergence_guard = 10.0;
  /// Largest initial-error norm for which the robust feasibility property
  /// held across seeds during calibration (informational; 0 = uncalibrated).
  double calibrated_rbar = 0.0;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

ControlMode mode_from_string(const std::string& name);
std::string to_string(ControlMode mode);

std::unique_ptr<DynamicsModel> load_robot(const std::filesystem::path& file);
PathSpline load_path(const std::filesystem::path& file);
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Everything derivable from a scenario before picking a controller mode.
struct ScenarioArtifacts {
  std::unique_ptr<DynamicsModel> model;  // controller-side model
  std::unique_ptr<DynamicsModel> plant;  // simulated plant (mass-scaled copy)
  PathSpline path;
  DiscretizationGrid grid{1};
  std::vector<StageConstraints> constraints;  // at the configured radius
  ControllableSets sets;
  std::vector<StageConstraints> nominal_constraints;  // radius 0
  ControllableSets nominal_sets;
  Profile nominal_profile;  // reference for OS/TT and duration yardstick
  double coefficient_seconds = 0.0;
  double recursion_seconds = 0.0;

  bool feasible() const {
    return sets.feasible() && nominal_sets.feasible();
  }
};

/// Loads robot + path, builds constraint tables and both set families, and
/// solves the nominal profile (left empty while infeasible).
ScenarioArtifacts prepare_scenario(const ScenarioConfig& config);

/// Initial coupled state with a seeded random-direction position error of the
/// configured norm: q = p(0) - e0, qd = 0, s = sd = 0.
CoupledState initial_state(const ScenarioConfig& config, const PathSpline& path,
                           std::uint64_t seed);

/// Runs one controller mode end to end.
SimResult run_mode(const ScenarioArtifacts& art, const ScenarioConfig& config,
                   ControlMode mode, std::uint64_t seed);

// File I/O. Writers emit max-precision decimal so every reader round-trips
// bit-exactly; readers throw std::runtime_error on malformed input.

void write_sets_csv(const std::filesystem::path& file,
                    const DiscretizationGrid& grid, const ControllableSets& sets);

struct SetsRow {
  int stage;
  double s, lo, hi;  // empty sets serialize as lo > hi
};
std::vector<SetsRow> read_sets_csv(const std::filesystem::path& file);

void write_telemetry_csv(const std::filesystem::path& file,
                         const SimResult& result);

struct TelemetryData {
  std::vector<double> t, s, x, u, err_norm;
  std::vector<std::vector<double>> tau;
  std::vector<int> infeasible;
};
TelemetryData read_telemetry_csv(const std::filesystem::path& file);

void write_summary_json(const std::filesystem::path& file, const SimResult& result,
                        double nominal_duration);

struct RunSummary {
  std::string status;
  double duration = 0.0;
  double max_err_pos = 0.0;
  double terminal_sd = 0.0;
  int infeasible_count = 0;
  int excursion_count = 0;
  double nominal_duration = 0.0;
};
RunSummary read_summary_json(const std::filesystem::path& file);

struct ComparisonRow {
  std::string mode;
  std::string status;
  double max_err_pos = 0.0;
  double duration = 0.0;
  int infeasible_count = 0;
  double nominal_duration = 0.0;
};
void write_comparison_csv(const std::filesystem::path& file,
                          const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> read_comparison_csv(const std::filesystem::path& file);

}  // namespace topt
