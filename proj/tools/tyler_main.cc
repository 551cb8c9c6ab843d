// Copyright 2026 The Tyler-FW Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tyler/bench.h"
#include "tyler/dataset.h"
#include "tyler/errors.h"
#include "tyler/solver.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAssumption = 2;

// Flag values as given on the command line, keyed by config-file key.
using Overrides = std::map<std::string, std::string>;

void add_flag(CLI::App* app, Overrides& overrides, const std::string& key,
              const std::string& help) {
  app->add_option_function<std::string>(
      "--" + key,
      [&overrides, key](const std::string& value) { overrides[key] = value; },
      help);
}

void add_generator_flags(CLI::App* app, Overrides& o) {
  add_flag(app, o, "p", "dimension");
  add_flag(app, o, "n", "number of samples");
  add_flag(app, o, "family",
           "gaussian_contaminated, multivariate_t or sphere_uniform");
  add_flag(app, o, "rho", "Toeplitz shape parameter");
  add_flag(app, o, "dof", "multivariate t degrees of freedom");
  add_flag(app, o, "contamination", "contamination rate times p");
  add_flag(app, o, "seed", "random seed");
}

void add_solver_flags(CLI::App* app, Overrides& o) {
  add_flag(app, o, "beta", "oracle slack in [0, 1)");
  add_flag(app, o, "tol", "TME residual tolerance");
  add_flag(app, o, "max-iters", "iteration cap (0: default)");
  add_flag(app, o, "rayleigh-rtol", "power method early-stop threshold");
  add_flag(app, o, "refresh-interval", "iterations between exact refreshes");
}

tyler::ExperimentConfig with_overrides(tyler::ExperimentConfig cfg,
                              const Overrides& overrides) {
  for (const auto& [key, value] : overrides) {
    tyler::apply_config_entry(cfg, key, value);
  }
  return cfg;
}

tyler::Dataset load_or_generate(const std::string& data_path,
                                const tyler::ExperimentConfig& cfg) {
  if (!data_path.empty()) return tyler::load_points(data_path);
  tyler::GeneratorConfig gen = cfg.generator;
  gen.seed = cfg.base_seed;
  return tyler::generate(gen);
}

void print_report(const tyler::ConditionReport& report,
                  const tyler::Dataset& data) {
  std::printf("p %ld\nn %ld\nrank %ld\n", static_cast<long>(data.dim()),
              static_cast<long>(data.size()), static_cast<long>(report.rank));
  std::printf("rank_full %s\n", report.rank_full ? "ok" : "FAILED");
  std::printf("n_gt_p %s\n", report.n_gt_p ? "ok" : "FAILED");
  std::printf("lines_ok %s (max repeated point %ld)\n",
              report.lines_ok ? "ok" : "FAILED",
              static_cast<long>(report.max_repeated));
  std::printf("n_ge_2p %s\n", report.n_ge_2p ? "ok" : "not met");
}

int run_solve(const std::string& data_path, const std::string& out_path,
              const tyler::ExperimentConfig& cfg, bool print_q) {
  const tyler::Dataset data = load_or_generate(data_path, cfg);
  tyler::SolveConfig solve_cfg;
  solve_cfg.variant = cfg.methods.front();
  solve_cfg.beta = cfg.beta;
  solve_cfg.tol_residual = cfg.tol_residual;
  solve_cfg.max_iters = cfg.max_iters;
  solve_cfg.eig = cfg.eig;
  solve_cfg.eig.rng_seed = cfg.base_seed;
  solve_cfg.refresh_interval = cfg.refresh_interval;
  solve_cfg.cost = cfg.cost;

  const tyler::SolveResult result = tyler::solve(data, solve_cfg);
  const double cost =
      result.trace.empty() ? 0.0 : result.trace.back().cost_units;
  const double objective = result.trace.empty()
                               ? result.initial.objective
                               : result.trace.back().objective;
  std::printf("variant %s\n",
              std::string(tyler::VariantName(solve_cfg.variant)).c_str());
  std::printf("converged %s\n", result.converged ? "yes" : "no");
  std::printf("iters %ld\n", result.iters);
  std::printf("residual %.6e\n", result.final_residual);
  std::printf("objective %.17g\n", objective);
  std::printf("cost_units %.6g\n", cost);
  std::printf("oracle_matvecs %ld\n", result.oracle_stats);
  if (!out_path.empty()) {
    std::vector<tyler::TraceRow> rows{result.initial};
    rows.insert(rows.end(), result.trace.begin(), result.trace.end());
    tyler::emit_csv(rows, out_path);
    std::printf("trace %s\n", out_path.c_str());
  }
  if (print_q) {
    std::printf("q_final\n");
    const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, " ");
    std::cout << result.q_final.format(fmt) << '\n';
  }
  return result.converged ? kExitOk : kExitError;
}

int run_bench(const std::string& config_path, const Overrides& overrides) {
  tyler::ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = tyler::load_experiment_config(config_path, cfg);
  }
  if (const char* dir = std::getenv("TYLER_OUTPUT_DIR"); dir && *dir) {
    cfg.output_dir = dir;
  }
  cfg = with_overrides(cfg, overrides);
  const tyler::Manifest manifest = tyler::run_experiment(cfg);
  std::printf("repeats_ok %d of %d\n", manifest.repeats_ok, cfg.repeats);
  std::printf("trace_files %zu\n", manifest.trace_files.size());
  if (!manifest.aggregate_file.empty()) {
    std::printf("aggregate %s\n", manifest.aggregate_file.string().c_str());
  }
  std::printf("manifest %s\n", manifest.manifest_file.string().c_str());
  std::printf("mean_oracle_matvecs %.3f\n", manifest.mean_oracle_matvecs);
  for (const auto& failure : manifest.failures) {
    std::fprintf(stderr, "%s\n", failure.c_str());
  }
  if (manifest.repeats_ok == 0) return kExitError;

  const auto rows = tyler::read_aggregate_csv(manifest.aggregate_file);
  for (double level : {1e-2, 1e-4, 1e-6}) {
    std::printf("cost to gap %.0e:", level);
    for (tyler::Variant method : cfg.methods) {
      const auto cost = tyler::cost_to_reach(rows, method, level);
      std::printf(" %s=", std::string(tyler::VariantName(method)).c_str());
      if (cost) {
        std::printf("%.4g", *cost);
      } else {
        std::printf("-");
      }
    }
    std::printf("\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tyler's M-estimator via Frank-Wolfe and fixed-point iteration"};
  app.require_subcommand(1);

  Overrides solve_flags;
  std::string solve_data;
  std::string solve_out;
  bool solve_print_q = false;
  CLI::App* solve = app.add_subcommand("solve", "estimate the shape matrix");
  add_flag(solve, solve_flags, "variant", "fw, afw, gafw or fpi");
  add_generator_flags(solve, solve_flags);
  add_solver_flags(solve, solve_flags);
  solve->add_option("--data", solve_data, "dataset file (default: generate)");
  solve->add_option("--out", solve_out, "write the trace CSV here");
  solve->add_flag("--print-q", solve_print_q, "print the final estimate");

  Overrides bench_flags;
  std::string bench_config;
  CLI::App* bench = app.add_subcommand("bench", "run a convergence experiment");
  bench->add_option("--config", bench_config, "key = value config file");
  add_flag(bench, bench_flags, "variant", "alias for --methods");
  add_flag(bench, bench_flags, "methods", "comma-separated list");
  add_flag(bench, bench_flags, "repeats", "number of repeats");
  add_flag(bench, bench_flags, "reference-iters", "FPI reference iterations");
  add_flag(bench, bench_flags, "jobs", "repeats run in parallel");
  add_flag(bench, bench_flags, "cost-budget", "normalized cost per method");
  add_flag(bench, bench_flags, "grid-points", "aggregate checkpoints");
  add_flag(bench, bench_flags, "out", "output directory");
  add_generator_flags(bench, bench_flags);
  add_solver_flags(bench, bench_flags);

  Overrides gen_flags;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "write a synthetic dataset");
  add_generator_flags(gen, gen_flags);
  gen->add_option("--out", gen_out, "dataset file")->required();

  Overrides check_flags;
  std::string check_data;
  CLI::App* check =
      app.add_subcommand("check", "report the necessary existence conditions");
  check->add_option("--data", check_data, "dataset file (default: generate)");
  add_generator_flags(check, check_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitError;
  }

  try {
    if (*solve) {
      tyler::ExperimentConfig cfg;
      cfg.tol_residual = 1e-6;
      return run_solve(solve_data, solve_out, with_overrides(cfg, solve_flags),
                       solve_print_q);
    }
    if (*bench) return run_bench(bench_config, bench_flags);
    if (*gen) {
      const tyler::ExperimentConfig cfg = with_overrides(tyler::ExperimentConfig{}, gen_flags);
      tyler::GeneratorConfig g = cfg.generator;
      g.seed = cfg.base_seed;
      tyler::save_points(tyler::generate(g), gen_out);
      std::printf("wrote %s (p %ld, n %ld)\n", gen_out.c_str(),
                  static_cast<long>(g.p), static_cast<long>(g.n));
      return kExitOk;
    }
    const tyler::ExperimentConfig cfg = with_overrides(tyler::ExperimentConfig{}, check_flags);
    const tyler::Dataset data = load_or_generate(check_data, cfg);
    const tyler::ConditionReport report =
        tyler::check_necessary_conditions(data);
    print_report(report, data);
    return report.solvable() ? kExitOk : kExitAssumption;
  } catch (const tyler::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (e.code() == tyler::ErrorCode::kAssumptionCheckFailed) {
      return kExitAssumption;
    }
    if (e.code() == tyler::ErrorCode::kInvalidArgument) {
      std::cerr << '\n' << app.help();
    }
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}
