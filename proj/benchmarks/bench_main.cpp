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

// Compares the OpenMP constraint-table kernel against its serial reference,
// times the (sequential) backward recursion, and sweeps a batch of
// perturbed-seed simulations serially vs. in parallel.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "topt/config.hpp"

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const double t0 = now_seconds();
    f();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

double max_table_difference(const std::vector<topt::StageConstraints>& lhs,
                            const std::vector<topt::StageConstraints>& rhs) {
  double worst = 0.0;
  for (size_t i = 0; i < lhs.size(); ++i) {
    worst = std::max(worst, (lhs[i].a - rhs[i].a).cwiseAbs().maxCoeff());
    worst = std::max(worst, (lhs[i].b - rhs[i].b).cwiseAbs().maxCoeff());
    worst = std::max(worst, (lhs[i].c - rhs[i].c).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  int table_stages = 200000;
  int batch_runs = 8;
  int repeats = 3;
  for (int k = 1; k + 1 < argc; k += 2) {
    const std::string flag = argv[k];
    const int value = std::atoi(argv[k + 1]);
    if (flag == "--table-stages") table_stages = value;
    if (flag == "--batch-runs") batch_runs = value;
    if (flag == "--repeats") repeats = value;
  }

#ifdef _OPENMP
  std::cout << "openmp threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "openmp threads: (compiled without OpenMP)\n";
#endif

  const std::filesystem::path config_dir = TOPT_CONFIG_DIR;
  const topt::ScenarioConfig cfg =
      topt::load_scenario(config_dir / "scenario_2dof.json");
  const auto model = topt::load_robot(cfg.robot_file);
  const topt::PathSpline path = topt::load_path(cfg.path_file);

  std::cout << std::fixed << std::setprecision(2);

  {
    const topt::DiscretizationGrid grid(table_stages);
    std::vector<topt::StageConstraints> serial, parallel;
    const double t_serial = time_best_of(repeats, [&] {
      serial = topt::build_constraint_table_serial(*model, path, grid,
                                                   cfg.radius);
    });
    const double t_parallel = time_best_of(repeats, [&] {
      parallel = topt::build_constraint_table(*model, path, grid, cfg.radius);
    });
    std::cout << "constraint table, N=" << table_stages << ":\n"
              << "  serial   " << t_serial * 1e3 << " ms\n"
              << "  parallel " << t_parallel * 1e3 << " ms  (speedup "
              << t_serial / t_parallel << "x, max diff "
              << std::scientific << max_table_difference(serial, parallel)
              << std::fixed << ")\n";
  }

  {
    const topt::ScenarioArtifacts art = topt::prepare_scenario(cfg);
    const double t_recursion = time_best_of(repeats, [&] {
      topt::compute_controllable_sets(
          art.constraints, art.grid,
          {cfg.terminal_sd.lo * cfg.terminal_sd.lo,
           cfg.terminal_sd.hi * cfg.terminal_sd.hi},
          cfg.x_max);
    });
    std::cout << "backward recursion, N=" << cfg.stages << " (sequential): "
              << t_recursion * 1e3 << " ms\n";

    std::vector<topt::SimResult> results(batch_runs);
    const double t_batch_serial = time_best_of(1, [&] {
      for (int r = 0; r < batch_runs; ++r) {
        results[r] =
            topt::run_mode(art, cfg, topt::ControlMode::kTopt, cfg.seed + r);
      }
    });
    const double t_batch_parallel = time_best_of(1, [&] {
#pragma omp parallel for schedule(dynamic)
      for (int r = 0; r < batch_runs; ++r) {
        results[r] =
            topt::run_mode(art, cfg, topt::ControlMode::kTopt, cfg.seed + r);
      }
    });
    std::cout << "batch of " << batch_runs << " TOPT runs:\n"
              << "  serial   " << t_batch_serial * 1e3 << " ms\n"
              << "  parallel " << t_batch_parallel * 1e3 << " ms  (speedup "
              << t_batch_serial / t_batch_parallel << "x)\n";
  }
  return 0;
}
