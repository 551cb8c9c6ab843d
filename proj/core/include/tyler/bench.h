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

#ifndef TYLER_BENCH_H_
#define TYLER_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tyler/dataset.h"
#include "tyler/solver.h"

namespace tyler {

struct ExperimentConfig {
  GeneratorConfig generator;
  std::vector<Variant> methods = {Variant::kFpi, Variant::kFw, Variant::kAfw,
                                  Variant::kGafw};
  // Q* comes from this many FPI iterations (started from I).
  long reference_iters = 250;
  int repeats = 20;
  // Repeat r uses generator seed base_seed + r.
  std::uint64_t base_seed = 1;
  std::filesystem::path output_dir = "tyler_bench";

  double beta = 0.5;
  // Methods stop at this TME residual, at max_iters, or at the cost budget.
  double tol_residual = 1e-10;
  long max_iters = 0;
  // 0 gives every method the reference run's cost, reference_iters * p.
  double cost_budget = 0.0;
  EigConfig eig;
  CostModel cost;
  int refresh_interval = SolverState::kDefaultRefreshInterval;

  int grid_points = 200;
  // Times the reference may be extended by reference_iters more iterations
  // when a method ends below f(Q*).
  int max_reference_extensions = 4;
  // Repeats run concurrently on this many threads.
  int jobs = 1;

  // Throws InvalidArgument on a malformed configuration.
  void validate() const;
};

// The full-scale experiment: p = 50, n = 2500, Toeplitz(0.85) shape, 20
// repeats, 250-iteration FPI reference.
ExperimentConfig full_scale_config(Family family);

// Applies one `key = value` setting; keys mirror the CLI flags (p, n, family,
// rho, dof, contamination, seed, beta, tol, max-iters, out, repeats,
// reference-iters, methods, variant, grid-points, jobs, cost-budget,
// matvec-unit, refresh-interval, rayleigh-rtol). Throws InvalidArgument.
void apply_config_entry(ExperimentConfig& cfg, std::string_view key,
                        std::string_view value);

// Flat `key = value` text; '#' starts a comment.
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        ExperimentConfig base = {});

std::vector<Variant> parse_methods(std::string_view list);

inline constexpr std::string_view kTraceCsvHeader =
    "t,cost_units,objective,gap,spectral_dist,residual_spectral,"
    "residual_min_eig,l_t,mu_t";

void emit_csv(const std::vector<TraceRow>& trace,
              const std::filesystem::path& path);
// Reads back the columns written by emit_csv.
std::vector<TraceRow> read_csv(const std::filesystem::path& path);

// Logs of tiny or non-positive gaps and distances are clamped to log(1e-16).
inline constexpr double kLogFloor = 1e-16;
double clamped_log(double value);

// `points` costs: 0, then geometrically spaced on [1, max_cost].
std::vector<double> cost_grid(double max_cost, int points);

// The last row whose cumulative cost does not exceed `cost`: the iterate
// available after spending that budget. Rows must start at cost 0.
const TraceRow& row_at_cost(const std::vector<TraceRow>& rows, double cost);

struct AggregateRow {
  Variant method = Variant::kFpi;
  double cost_units = 0.0;
  double mean_log_spectral_dist = 0.0;
  double mean_log_gap = 0.0;
  int count = 0;
};

inline constexpr std::string_view kAggregateCsvHeader =
    "method,cost_units,mean_log_spectral_dist,mean_log_gap,count";

// traces[r] holds the rows (initial row first) of one repeat of `method`.
std::vector<AggregateRow> aggregate_method(
    Variant method, const std::vector<std::vector<TraceRow>>& traces,
    const std::vector<double>& grid);

void emit_aggregate_csv(const std::vector<AggregateRow>& rows,
                        const std::filesystem::path& path);
std::vector<AggregateRow> read_aggregate_csv(const std::filesystem::path& path);

// Smallest grid cost at which the method's mean log gap reaches log(level).
std::optional<double> cost_to_reach(const std::vector<AggregateRow>& rows,
                                    Variant method, double gap_level);

struct Manifest {
  std::vector<std::filesystem::path> trace_files;
  std::filesystem::path aggregate_file;
  std::filesystem::path manifest_file;
  std::vector<std::string> failures;
  int repeats_ok = 0;
  // Matvecs per iteration, averaged over all successful FW-variant runs.
  double mean_oracle_matvecs = 0.0;
};

// For each repeat: generate data, compute the reference, run every method
// from the trace-normalized sample covariance, and write
// repeat_<r>_<method>.csv. Then write aggregate.csv and manifest.txt.
// Per-repeat failures are recorded, not thrown.
Manifest run_experiment(const ExperimentConfig& cfg);

}  // namespace tyler

#endif  // TYLER_BENCH_H_
