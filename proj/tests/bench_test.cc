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


#include "tyler/bench.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>

#include <gtest/gtest.h>

namespace tyler {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tyler_bench_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

bool same_bits(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

TraceRow row(long t, double cost, double gap) {
  TraceRow r;
  r.t = t;
  r.cost_units = cost;
  r.gap = gap;
  r.spectral_dist = gap * 2.0;
  return r;
}

TEST(TraceCsvTest, RoundTripIsBitExact) {
  std::vector<TraceRow> trace;
  TraceRow first;
  first.objective = 1.0 / 3.0;
  first.gap = 0.1 + 0.2;
  first.spectral_dist = std::nextafter(1.0, 2.0);
  first.residual_spectral = 1e-300;
  first.residual_min_eig = -std::numeric_limits<double>::min();
  trace.push_back(first);
  TraceRow second = first;
  second.t = 1;
  second.cost_units = 12.5;
  second.l_t = -0.123456789012345678;
  second.mu_t = 6.02214076e23;
  trace.push_back(second);
  TraceRow third = second;
  third.t = 2;
  third.objective = -std::exp(1.0);
  trace.push_back(third);

  const fs::path path = fresh_dir("csv") / "trace.csv";
  emit_csv(trace, path);
  const auto lines = lines_of(path);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], kTraceCsvHeader);

  const std::vector<TraceRow> back = read_csv(path);
  ASSERT_EQ(back.size(), trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    EXPECT_EQ(back[i].t, trace[i].t);
    EXPECT_TRUE(same_bits(back[i].cost_units, trace[i].cost_units));
    EXPECT_TRUE(same_bits(back[i].objective, trace[i].objective));
    EXPECT_TRUE(same_bits(back[i].gap, trace[i].gap));
    EXPECT_TRUE(same_bits(back[i].spectral_dist, trace[i].spectral_dist));
    EXPECT_TRUE(same_bits(back[i].residual_spectral, trace[i].residual_spectral));
    EXPECT_TRUE(same_bits(back[i].residual_min_eig, trace[i].residual_min_eig));
    EXPECT_TRUE(same_bits(back[i].l_t, trace[i].l_t));
    EXPECT_TRUE(same_bits(back[i].mu_t, trace[i].mu_t));
  }
}

TEST(TraceCsvTest, MissingFileAndEmptyTrace) {
  EXPECT_THROW(read_csv(fresh_dir("missing") / "none.csv"), Error);
  EXPECT_THROW(emit_csv({}, fresh_dir("empty") / "t.csv"), Error);
}

TEST(GridTest, GeometricSpacing) {
  const std::vector<double> grid = cost_grid(1000.0, 5);
  ASSERT_EQ(grid.size(), 5u);
  EXPECT_EQ(grid[0], 0.0);
  EXPECT_DOUBLE_EQ(grid[1], 1.0);
  EXPECT_NEAR(grid[2], 10.0, 1e-12);
  EXPECT_NEAR(grid[3], 100.0, 1e-10);
  EXPECT_DOUBLE_EQ(grid[4], 1000.0);
}

TEST(GridTest, RowAtCostTakesLastAffordableRow) {
  const std::vector<TraceRow> rows = {row(0, 0.0, 1.0), row(1, 3.0, 0.5),
                                      row(2, 6.0, 0.25)};
  EXPECT_EQ(row_at_cost(rows, 0.0).t, 0);
  EXPECT_EQ(row_at_cost(rows, 2.9).t, 0);
  EXPECT_EQ(row_at_cost(rows, 3.0).t, 1);
  EXPECT_EQ(row_at_cost(rows, 100.0).t, 2);
}

TEST(AggregateTest, MeansOfClampedLogs) {
  const std::vector<std::vector<TraceRow>> traces = {
      {row(0, 0.0, 1.0), row(1, 2.0, 1e-3)},
      {row(0, 0.0, 4.0), row(1, 5.0, 0.0)}};
  const auto rows = aggregate_method(Variant::kAfw, traces, {0.0, 2.0, 5.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].mean_log_gap, 0.5 * std::log(4.0), 1e-15);
  EXPECT_NEAR(rows[1].mean_log_gap, 0.5 * (std::log(1e-3) + std::log(4.0)),
              1e-15);
  EXPECT_NEAR(rows[2].mean_log_gap, 0.5 * (std::log(1e-3) + std::log(1e-16)),
              1e-15);
  EXPECT_NEAR(rows[2].mean_log_spectral_dist,
              0.5 * (std::log(2e-3) + std::log(1e-16)), 1e-15);
  EXPECT_EQ(rows[2].count, 2);
  EXPECT_EQ(clamped_log(-1.0), std::log(kLogFloor));
  EXPECT_EQ(cost_to_reach(rows, Variant::kAfw, 1e-3), 5.0);
  EXPECT_EQ(cost_to_reach(rows, Variant::kAfw, 1e-10), std::nullopt);
  EXPECT_EQ(cost_to_reach(rows, Variant::kAfw, 0.1), 2.0);
  EXPECT_EQ(cost_to_reach(rows, Variant::kFpi, 0.1), std::nullopt);

  const fs::path path = fresh_dir("aggregate") / "aggregate.csv";
  emit_aggregate_csv(rows, path);
  const auto back = read_aggregate_csv(path);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].method, rows[i].method);
    EXPECT_EQ(back[i].cost_units, rows[i].cost_units);
    EXPECT_EQ(back[i].mean_log_gap, rows[i].mean_log_gap);
    EXPECT_EQ(back[i].mean_log_spectral_dist, rows[i].mean_log_spectral_dist);
    EXPECT_EQ(back[i].count, rows[i].count);
  }
}

TEST(ConfigTest, ParsesKeyValueFile) {
  const fs::path path = fresh_dir("config") / "exp.cfg";
  std::ofstream(path) << "# smoke\n"
                         "p = 12\n"
                         "n=300\n"
                         "family = multivariate_t   # heavy tails\n"
                         "dof = 3.5\n"
                         "methods = gafw, fpi\n"
                         "repeats = 3\n"
                         "seed = 99\n"
                         "out = somewhere\n";
  const ExperimentConfig cfg = load_experiment_config(path);
  EXPECT_EQ(cfg.generator.p, 12);
  EXPECT_EQ(cfg.generator.n, 300);
  EXPECT_EQ(cfg.generator.family, Family::kMultivariateT);
  EXPECT_EQ(cfg.generator.dof, 3.5);
  EXPECT_EQ(cfg.methods, (std::vector<Variant>{Variant::kGafw, Variant::kFpi}));
  EXPECT_EQ(cfg.repeats, 3);
  EXPECT_EQ(cfg.base_seed, 99u);
  EXPECT_EQ(cfg.output_dir, fs::path("somewhere"));
}

TEST(ConfigTest, RejectsMalformedEntries) {
  ExperimentConfig cfg;
  EXPECT_THROW(apply_config_entry(cfg, "colour", "blue"), Error);
  EXPECT_THROW(apply_config_entry(cfg, "p", "ten"), Error);
  EXPECT_THROW(apply_config_entry(cfg, "methods", "fpi,newton"), Error);
  EXPECT_THROW(apply_config_entry(cfg, "family", "cauchy"), Error);
  const fs::path path = fresh_dir("bad") / "exp.cfg";
  std::ofstream(path) << "p 12\n";
  EXPECT_THROW(load_experiment_config(path), Error);
  cfg = ExperimentConfig{};
  cfg.repeats = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(ConfigTest, FullScaleExperiment) {
  const ExperimentConfig cfg = full_scale_config(Family::kGaussianContaminated);
  EXPECT_EQ(cfg.generator.p, 50);
  EXPECT_EQ(cfg.generator.n, 2500);
  EXPECT_EQ(cfg.repeats, 20);
  EXPECT_EQ(cfg.reference_iters, 250);
  EXPECT_EQ(cfg.generator.shape.realize(3)(0, 2), 0.85 * 0.85);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(ExperimentTest, SmokeRunParsesBack) {
  ExperimentConfig cfg;
  cfg.generator.p = 10;
  cfg.generator.n = 200;
  cfg.generator.family = Family::kSphereUniform;
  cfg.repeats = 2;
  cfg.reference_iters = 100;
  cfg.grid_points = 20;
  cfg.output_dir = fresh_dir("smoke");
  const Manifest manifest = run_experiment(cfg);
  EXPECT_EQ(manifest.repeats_ok, 2);
  EXPECT_TRUE(manifest.failures.empty());
  ASSERT_EQ(manifest.trace_files.size(), 8u);
  EXPECT_TRUE(fs::exists(manifest.manifest_file));
  EXPECT_EQ(lines_of(manifest.manifest_file).size(), 8u + 1u + 2u);

  std::map<std::string, std::vector<std::vector<TraceRow>>> traces;
  for (const fs::path& file : manifest.trace_files) {
    const std::vector<TraceRow> rows = read_csv(file);
    ASSERT_FALSE(rows.empty()) << file;
    EXPECT_EQ(rows.front().t, 0);
    EXPECT_EQ(rows.front().cost_units, 0.0);
    const std::string name = file.stem().string();
    const std::string method = name.substr(name.rfind('_') + 1);
    if (method != "fpi") {
      for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LE(rows[i].gap, rows[i - 1].gap + 1e-12) << file;
      }
    }
    traces[method].push_back(rows);
  }

  const auto aggregate = read_aggregate_csv(manifest.aggregate_file);
  ASSERT_EQ(aggregate.size(), 4u * 20u);
  for (const AggregateRow& agg : aggregate) {
    const auto& runs = traces[std::string(VariantName(agg.method))];
    ASSERT_EQ(runs.size(), 2u);
    double log_gap = 0.0;
    double log_dist = 0.0;
    for (const auto& rows : runs) {
      const TraceRow& at = row_at_cost(rows, agg.cost_units);
      log_gap += std::log(std::max(at.gap, kLogFloor));
      log_dist += std::log(std::max(at.spectral_dist, kLogFloor));
    }
    EXPECT_NEAR(agg.mean_log_gap, log_gap / 2.0, 1e-12);
    EXPECT_NEAR(agg.mean_log_spectral_dist, log_dist / 2.0, 1e-12);
    EXPECT_EQ(agg.count, 2);
  }
}

TEST(ExperimentTest, RepeatsAreDeterministic) {
  ExperimentConfig cfg;
  cfg.generator.p = 6;
  cfg.generator.n = 80;
  cfg.repeats = 2;
  cfg.reference_iters = 60;
  cfg.grid_points = 10;
  cfg.output_dir = fresh_dir("det_a");
  const Manifest a = run_experiment(cfg);
  cfg.output_dir = fresh_dir("det_b");
  cfg.jobs = 2;
  const Manifest b = run_experiment(cfg);
  ASSERT_EQ(a.trace_files.size(), b.trace_files.size());
  for (std::size_t i = 0; i < a.trace_files.size(); ++i) {
    EXPECT_EQ(lines_of(a.trace_files[i]), lines_of(b.trace_files[i]));
  }
  EXPECT_EQ(lines_of(a.aggregate_file), lines_of(b.aggregate_file));
}

}  // namespace
}  // namespace tyler
