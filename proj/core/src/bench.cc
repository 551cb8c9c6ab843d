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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <utility>

#include "tyler/errors.h"

namespace tyler {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(std::string_view key, const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') {
    throw Error(ErrorCode::kInvalidArgument,
                "bad number for " + std::string(key) + ": '" + text + "'");
  }
  return value;
}

long to_long(std::string_view key, const std::string& text) {
  char* end = nullptr;
  const long value = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0') {
    throw Error(ErrorCode::kInvalidArgument,
                "bad integer for " + std::string(key) + ": '" + text + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_field(const std::string& text, const std::filesystem::path& path) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') {
    throw Error(ErrorCode::kMalformedHeader,
                "bad CSV field '" + text + "' in " + path.string());
  }
  return value;
}

std::vector<std::vector<std::string>> read_csv_rows(
    const std::filesystem::path& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    throw Error(ErrorCode::kMalformedHeader,
                "unexpected CSV header in " + path.string());
  }
  const std::size_t columns = split(header, ',').size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != columns) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "wrong column count in " + path.string(),
                  static_cast<long>(rows.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

SpdMatrix sample_covariance(const Dataset& data) {
  SpdMatrix s = data.points() * data.points().transpose() /
                static_cast<double>(data.size());
  symmetrize(s);
  s *= static_cast<double>(data.dim()) / s.trace();
  return s;
}

struct RepeatOutcome {
  bool ok = false;
  std::string failure;
  // Rows (initial first) per method, in cfg.methods order.
  std::vector<std::vector<TraceRow>> traces;
  std::vector<std::filesystem::path> files;
  long fw_iterations = 0;
  long fw_matvecs = 0;
};

std::vector<TraceRow> with_initial(const SolveResult& result) {
  std::vector<TraceRow> rows;
  rows.reserve(result.trace.size() + 1);
  rows.push_back(result.initial);
  rows.insert(rows.end(), result.trace.begin(), result.trace.end());
  return rows;
}

RepeatOutcome run_repeat(const ExperimentConfig& cfg, int r) {
  RepeatOutcome out;
  try {
    GeneratorConfig gen = cfg.generator;
    gen.seed = cfg.base_seed + static_cast<std::uint64_t>(r);
    const Dataset data = generate(gen);

    SolveConfig ref_cfg;
    ref_cfg.variant = Variant::kFpi;
    ref_cfg.max_iters = cfg.reference_iters;
    ref_cfg.tol_residual = 0.0;
    ref_cfg.record_trace = false;
    SolveResult ref = solve(data, ref_cfg);
    ReferenceSolution reference;

    SolveConfig base;
    base.beta = cfg.beta;
    base.tol_residual = cfg.tol_residual;
    base.max_iters = cfg.max_iters;
    base.eig = cfg.eig;
    base.eig.rng_seed = gen.seed;
    base.cost = cfg.cost;
    base.refresh_interval = cfg.refresh_interval;
    base.record_trace = true;
    base.initial_q = sample_covariance(data);
    base.max_cost_units = cfg.cost_budget > 0.0
                              ? cfg.cost_budget
                              : static_cast<double>(cfg.reference_iters) *
                                    static_cast<double>(data.dim());

    for (int extension = 0;; ++extension) {
      SolverState ref_state(data, ref.q_final, 0);
      reference = {ref.q_final, objective_value(ref_state)};
      base.reference = reference;

      out.traces.clear();
      out.fw_iterations = 0;
      out.fw_matvecs = 0;
      bool below_reference = false;
      for (Variant method : cfg.methods) {
        SolveConfig run = base;
        run.variant = method;
        const SolveResult result = solve(data, run);
        out.traces.push_back(with_initial(result));
        if (out.traces.back().back().gap < 0.0) below_reference = true;
        if (method != Variant::kFpi) {
          out.fw_iterations += result.iters;
          out.fw_matvecs += result.oracle_stats;
        }
      }
      if (!below_reference || extension >= cfg.max_reference_extensions) break;
      SolveConfig more = ref_cfg;
      more.initial_q = ref.q_final;
      ref = solve(data, more);
    }

    char name[64];
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      std::snprintf(name, sizeof(name), "repeat_%03d_%s.csv", r,
                    std::string(VariantName(cfg.methods[m])).c_str());
      const std::filesystem::path path = cfg.output_dir / name;
      emit_csv(out.traces[m], path);
      out.files.push_back(path);
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.failure = "repeat " + std::to_string(r) + ": " + e.what();
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  generator.validate();
  if (methods.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no methods configured");
  }
  if (repeats < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  }
  if (reference_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument, "reference-iters must be >= 1");
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must lie in [0, 1)");
  }
  if (grid_points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "grid-points must be >= 2");
  }
  if (jobs < 1) throw Error(ErrorCode::kInvalidArgument, "jobs must be >= 1");
}

ExperimentConfig full_scale_config(Family family) {
  ExperimentConfig cfg;
  cfg.generator.p = 50;
  cfg.generator.n = 2500;
  cfg.generator.shape = ShapeMatrixSpec::Toeplitz(0.85);
  cfg.generator.family = family;
  cfg.generator.rate_numerator = 0.9;
  cfg.generator.dof = 2.0;
  cfg.repeats = 20;
  cfg.reference_iters = 250;
  return cfg;
}

std::vector<Variant> parse_methods(std::string_view list) {
  std::vector<Variant> methods;
  for (const std::string& name : split(list, ',')) {
    if (name.empty()) continue;
    const auto variant = ParseVariant(name);
    if (!variant) {
      throw Error(ErrorCode::kInvalidArgument, "unknown method '" + name + "'");
    }
    methods.push_back(*variant);
  }
  return methods;
}

void apply_config_entry(ExperimentConfig& cfg, std::string_view key_view,
                        std::string_view value_view) {
  const std::string key = trim(key_view);
  const std::string value = trim(value_view);
  GeneratorConfig& gen = cfg.generator;
  if (key == "p") {
    gen.p = to_long(key, value);
  } else if (key == "n") {
    gen.n = to_long(key, value);
  } else if (key == "family") {
    const auto family = ParseFamily(value);
    if (!family) {
      throw Error(ErrorCode::kInvalidArgument, "unknown family '" + value + "'");
    }
    gen.family = *family;
  } else if (key == "rho") {
    gen.shape = ShapeMatrixSpec::Toeplitz(to_double(key, value));
  } else if (key == "dof") {
    gen.dof = to_double(key, value);
  } else if (key == "contamination") {
    gen.rate_numerator = to_double(key, value);
  } else if (key == "seed") {
    cfg.base_seed = static_cast<std::uint64_t>(to_long(key, value));
  } else if (key == "beta") {
    cfg.beta = to_double(key, value);
  } else if (key == "tol") {
    cfg.tol_residual = to_double(key, value);
  } else if (key == "max-iters") {
    cfg.max_iters = to_long(key, value);
  } else if (key == "out") {
    cfg.output_dir = value;
  } else if (key == "repeats") {
    cfg.repeats = static_cast<int>(to_long(key, value));
  } else if (key == "reference-iters") {
    cfg.reference_iters = to_long(key, value);
  } else if (key == "methods" || key == "variant") {
    cfg.methods = parse_methods(value);
  } else if (key == "grid-points") {
    cfg.grid_points = static_cast<int>(to_long(key, value));
  } else if (key == "jobs") {
    cfg.jobs = static_cast<int>(to_long(key, value));
  } else if (key == "cost-budget") {
    cfg.cost_budget = to_double(key, value);
  } else if (key == "matvec-unit") {
    cfg.cost.matvec_unit = to_double(key, value);
  } else if (key == "refresh-interval") {
    cfg.refresh_interval = static_cast<int>(to_long(key, value));
  } else if (key == "rayleigh-rtol") {
    cfg.eig.rayleigh_rtol = to_double(key, value);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected key = value",
                  line_no);
    }
    apply_config_entry(base, std::string_view(line).substr(0, eq),
                       std::string_view(line).substr(eq + 1));
  }
  return base;
}

void emit_csv(const std::vector<TraceRow>& trace,
              const std::filesystem::path& path) {
  if (trace.empty()) throw Error(ErrorCode::kInvalidArgument, "empty trace");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << kTraceCsvHeader << '\n';
  for (const TraceRow& row : trace) {
    out << row.t << ',' << format_double(row.cost_units) << ','
        << format_double(row.objective) << ',' << format_double(row.gap) << ','
        << format_double(row.spectral_dist) << ','
        << format_double(row.residual_spectral) << ','
        << format_double(row.residual_min_eig) << ','
        << format_double(row.l_t) << ',' << format_double(row.mu_t) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::vector<TraceRow> read_csv(const std::filesystem::path& path) {
  std::vector<TraceRow> rows;
  for (const auto& fields : read_csv_rows(path, kTraceCsvHeader)) {
    TraceRow row;
    row.t = static_cast<long>(parse_field(fields[0], path));
    row.cost_units = parse_field(fields[1], path);
    row.objective = parse_field(fields[2], path);
    row.gap = parse_field(fields[3], path);
    row.spectral_dist = parse_field(fields[4], path);
    row.residual_spectral = parse_field(fields[5], path);
    row.residual_min_eig = parse_field(fields[6], path);
    row.l_t = parse_field(fields[7], path);
    row.mu_t = parse_field(fields[8], path);
    rows.push_back(row);
  }
  return rows;
}

double clamped_log(double value) {
  if (!(value > kLogFloor)) return std::log(kLogFloor);
  return std::log(value);
}

std::vector<double> cost_grid(double max_cost, int points) {
  std::vector<double> grid{0.0};
  if (points < 2 || !(max_cost > 0.0)) return grid;
  if (max_cost <= 1.0 || points == 2) {
    grid.push_back(max_cost);
    return grid;
  }
  const double step = std::log(max_cost) / static_cast<double>(points - 2);
  for (int k = 0; k < points - 1; ++k) {
    grid.push_back(k == points - 2 ? max_cost
                                   : std::exp(step * static_cast<double>(k)));
  }
  return grid;
}

const TraceRow& row_at_cost(const std::vector<TraceRow>& rows, double cost) {
  if (rows.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty trace");
  }
  auto it = std::upper_bound(
      rows.begin(), rows.end(), cost,
      [](double c, const TraceRow& row) { return c < row.cost_units; });
  if (it == rows.begin()) return rows.front();
  return *std::prev(it);
}

std::vector<AggregateRow> aggregate_method(
    Variant method, const std::vector<std::vector<TraceRow>>& traces,
    const std::vector<double>& grid) {
  std::vector<AggregateRow> out;
  out.reserve(grid.size());
  for (double c : grid) {
    AggregateRow row;
    row.method = method;
    row.cost_units = c;
    for (const auto& trace : traces) {
      const TraceRow& at = row_at_cost(trace, c);
      row.mean_log_spectral_dist += clamped_log(at.spectral_dist);
      row.mean_log_gap += clamped_log(at.gap);
      ++row.count;
    }
    if (row.count > 0) {
      row.mean_log_spectral_dist /= row.count;
      row.mean_log_gap /= row.count;
    }
    out.push_back(row);
  }
  return out;
}

void emit_aggregate_csv(const std::vector<AggregateRow>& rows,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << kAggregateCsvHeader << '\n';
  for (const AggregateRow& row : rows) {
    out << VariantName(row.method) << ',' << format_double(row.cost_units)
        << ',' << format_double(row.mean_log_spectral_dist) << ','
        << format_double(row.mean_log_gap) << ',' << row.count << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::vector<AggregateRow> read_aggregate_csv(
    const std::filesystem::path& path) {
  std::vector<AggregateRow> rows;
  for (const auto& fields : read_csv_rows(path, kAggregateCsvHeader)) {
    AggregateRow row;
    const auto method = ParseVariant(fields[0]);
    if (!method) {
      throw Error(ErrorCode::kMalformedHeader,
                  "unknown method in " + path.string());
    }
    row.method = *method;
    row.cost_units = parse_field(fields[1], path);
    row.mean_log_spectral_dist = parse_field(fields[2], path);
    row.mean_log_gap = parse_field(fields[3], path);
    row.count = static_cast<int>(parse_field(fields[4], path));
    rows.push_back(row);
  }
  return rows;
}

std::optional<double> cost_to_reach(const std::vector<AggregateRow>& rows,
                                    Variant method, double gap_level) {
  const double target = std::log(gap_level);
  for (const AggregateRow& row : rows) {
    if (row.method == method && row.mean_log_gap <= target) {
      return row.cost_units;
    }
  }
  return std::nullopt;
}

Manifest run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create " + cfg.output_dir.string() +
                                    ": " + ec.message());
  }

  std::vector<RepeatOutcome> outcomes(cfg.repeats);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int r = next++; r < cfg.repeats; r = next++) {
      outcomes[r] = run_repeat(cfg, r);
    }
  };
  const int threads = std::min(cfg.jobs, cfg.repeats);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Manifest manifest;
  long fw_iterations = 0;
  long fw_matvecs = 0;
  double max_cost = 0.0;
  std::vector<std::vector<std::vector<TraceRow>>> per_method(cfg.methods.size());
  for (const RepeatOutcome& outcome : outcomes) {
    if (!outcome.ok) {
      manifest.failures.push_back(outcome.failure);
      continue;
    }
    ++manifest.repeats_ok;
    fw_iterations += outcome.fw_iterations;
    fw_matvecs += outcome.fw_matvecs;
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      max_cost = std::max(max_cost, outcome.traces[m].back().cost_units);
      per_method[m].push_back(outcome.traces[m]);
    }
    manifest.trace_files.insert(manifest.trace_files.end(),
                                outcome.files.begin(), outcome.files.end());
  }
  if (fw_iterations > 0) {
    manifest.mean_oracle_matvecs =
        static_cast<double>(fw_matvecs) / static_cast<double>(fw_iterations);
  }

  if (manifest.repeats_ok > 0) {
    const std::vector<double> grid = cost_grid(max_cost, cfg.grid_points);
    std::vector<AggregateRow> rows;
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      auto method_rows = aggregate_method(cfg.methods[m], per_method[m], grid);
      rows.insert(rows.end(), method_rows.begin(), method_rows.end());
    }
    manifest.aggregate_file = cfg.output_dir / "aggregate.csv";
    emit_aggregate_csv(rows, manifest.aggregate_file);
  }

  manifest.manifest_file = cfg.output_dir / "manifest.txt";
  std::ofstream out(manifest.manifest_file);
  if (!out) {
    throw Error(ErrorCode::kIo,
                "cannot write " + manifest.manifest_file.string());
  }
  for (const auto& file : manifest.trace_files) {
    out << "trace " << file.filename().string() << '\n';
  }
  if (!manifest.aggregate_file.empty()) {
    out << "aggregate " << manifest.aggregate_file.filename().string() << '\n';
  }
  for (const auto& failure : manifest.failures) {
    out << "failure " << failure << '\n';
  }
  out << "repeats_ok " << manifest.repeats_ok << '\n';
  out << "mean_oracle_matvecs " << format_double(manifest.mean_oracle_matvecs)
      << '\n';
  return manifest;
}

}  // namespace tyler
