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

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "topt/config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitDiverged = 3;

struct CommonArgs {
  std::string config_file;
  std::optional<int> stages;
  std::optional<double> radius;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_file, "Scenario config JSON")
      ->required();
  cmd->add_option("--stages", args->stages, "Override stage count N");
  cmd->add_option("--radius", args->radius, "Override perturbation radius R");
  cmd->add_option("--seed", args->seed, "Override random seed");
  cmd->add_option("--out", args->out_dir, "Override output directory");
}

topt::ScenarioConfig load_with_overrides(const CommonArgs& args) {
  topt::ScenarioConfig cfg = topt::load_scenario(args.config_file);
  if (args.stages) cfg.stages = *args.stages;
  if (args.radius) cfg.radius = *args.radius;
  if (args.seed) cfg.seed = *args.seed;
  if (args.out_dir) cfg.out_dir = *args.out_dir;
  cfg.validate();
  return cfg;
}

int status_exit_code(topt::SimStatus status) {
  switch (status) {
    case topt::SimStatus::kReached:
      return kExitOk;
    case topt::SimStatus::kDiverged:
      return kExitDiverged;
    default:
      return kExitInfeasible;
  }
}

int cmd_solve(const CommonArgs& args) {
  const topt::ScenarioConfig cfg = load_with_overrides(args);
  const topt::ScenarioArtifacts art = topt::prepare_scenario(cfg);
  topt::write_sets_csv(cfg.out_dir / "sets.csv", art.grid, art.sets);
  std::cout << "coefficients: " << std::fixed << std::setprecision(3)
            << art.coefficient_seconds * 1e3 << " ms\n"
            << "recursion:    " << art.recursion_seconds * 1e3 << " ms\n";
  if (!art.sets.feasible()) {
    std::cout << "infeasible: first empty set at stage "
              << art.sets.first_empty_stage << "\n";
    return kExitInfeasible;
  }
  std::cout << "feasible: K_0 = [" << std::setprecision(6)
            << art.sets.sets.front().lo << ", " << art.sets.sets.front().hi
            << "], wrote " << (cfg.out_dir / "sets.csv").string() << "\n";
  return kExitOk;
}

int cmd_simulate(const CommonArgs& args, const std::string& mode_name) {
  const topt::ScenarioConfig cfg = load_with_overrides(args);
  const topt::ControlMode mode = topt::mode_from_string(mode_name);
  const topt::ScenarioArtifacts art = topt::prepare_scenario(cfg);
  if (mode == topt::ControlMode::kTopt ? !art.sets.feasible()
                                       : art.nominal_profile.x.empty()) {
    std::cout << "infeasible scenario: no usable sets/profile\n";
    return kExitInfeasible;
  }
  const topt::SimResult result = topt::run_mode(art, cfg, mode, cfg.seed);
  const std::filesystem::path dir = cfg.out_dir / mode_name;
  topt::write_telemetry_csv(dir / "telemetry.csv", result);
  topt::write_summary_json(dir / "summary.json", result,
                           art.nominal_profile.duration);
  std::cout << mode_name << ": status=" << topt::to_string(result.status)
            << " duration=" << std::setprecision(6) << result.duration
            << " max_err=" << result.max_err_pos
            << " infeasible_events=" << result.infeasible_count << "\n";
  return status_exit_code(result.status);
}

int cmd_compare(const CommonArgs& args) {
  const topt::ScenarioConfig cfg = load_with_overrides(args);
  const topt::ScenarioArtifacts art = topt::prepare_scenario(cfg);
  if (!art.sets.feasible() || art.nominal_profile.x.empty()) {
    std::cout << "infeasible scenario: no usable sets/profile\n";
    return kExitInfeasible;
  }
  std::vector<topt::ComparisonRow> rows;
  int exit_code = kExitOk;
  for (const topt::ControlMode mode : cfg.modes) {
    const topt::SimResult result = topt::run_mode(art, cfg, mode, cfg.seed);
    const std::string name = topt::to_string(mode);
    const std::filesystem::path dir = cfg.out_dir / name;
    topt::write_telemetry_csv(dir / "telemetry.csv", result);
    topt::write_summary_json(dir / "summary.json", result,
                             art.nominal_profile.duration);
    rows.push_back({name, topt::to_string(result.status), result.max_err_pos,
                    result.duration, result.infeasible_count,
                    art.nominal_profile.duration});
    exit_code = std::max(exit_code, status_exit_code(result.status));
  }
  topt::write_comparison_csv(cfg.out_dir / "comparison.csv", rows);

  std::cout << "nominal optimal duration: " << std::setprecision(6)
            << art.nominal_profile.duration << " s\n";
  std::cout << std::left << std::setw(6) << "mode" << std::setw(12) << "status"
            << std::setw(12) << "max_err" << std::setw(12) << "duration"
            << "infeasible\n";
  for (const topt::ComparisonRow& r : rows) {
    std::cout << std::left << std::setw(6) << r.mode << std::setw(12)
              << r.status << std::setw(12) << r.max_err_pos << std::setw(12)
              << r.duration << r.infeasible_count << "\n";
  }
  return exit_code;
}

int cmd_sets_plot_data(const CommonArgs& args, std::vector<double> radii) {
  const topt::ScenarioConfig cfg = load_with_overrides(args);
  if (radii.empty()) radii = {0.0, cfg.radius};
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir / "sets_plot.csv");
  out << std::setprecision(17) << "radius,stage,s,K_lo,K_hi\n";
  for (const double r : radii) {
    topt::ScenarioConfig c = cfg;
    c.radius = r;
    const topt::ScenarioArtifacts art = topt::prepare_scenario(c);
    for (size_t i = 0; i < art.sets.sets.size(); ++i) {
      out << r << ',' << i << ',' << art.grid.s(static_cast<int>(i)) << ','
          << art.sets.sets[i].lo << ',' << art.sets.sets[i].hi << '\n';
    }
  }
  std::cout << "wrote " << (cfg.out_dir / "sets_plot.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust time-optimal path tracking for torque-limited arms"};
  app.require_subcommand(1);

  CommonArgs solve_args, sim_args, cmp_args, plot_args;
  std::string mode_name = "topt";
  std::vector<double> radii;

  CLI::App* solve = app.add_subcommand("solve", "Compute robust controllable sets");
  add_common(solve, &solve_args);
  CLI::App* simulate = app.add_subcommand("simulate", "Run one controller mode");
  add_common(simulate, &sim_args);
  simulate->add_option("--mode", mode_name, "Controller: topt, os or tt");
  CLI::App* compare = app.add_subcommand("compare", "Run all configured modes");
  add_common(compare, &cmp_args);
  CLI::App* plot = app.add_subcommand("sets-plot-data",
                                      "Emit sets for several radii");
  add_common(plot, &plot_args);
  plot->add_option("--radius-list", radii, "Radii to sweep (default: 0 and R)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (simulate->parsed()) return cmd_simulate(sim_args, mode_name);
    if (compare->parsed()) return cmd_compare(cmp_args);
    if (plot->parsed()) return cmd_sets_plot_data(plot_args, radii);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
