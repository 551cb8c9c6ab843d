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


#include <benchmark/benchmark.h>

#include "bench_data.h"
#include "tyler/eig_oracle.h"
#include "tyler/linalg.h"

namespace tyler {
namespace {

void BM_GradientMatvec(benchmark::State& st) {
  const Dataset data = bench::square_dataset(st.range(0));
  const SolverState state(data, bench::warm_iterate(data));
  const Vector v = Vector::Ones(data.dim());
  for (auto _ : st) benchmark::DoNotOptimize(gradient_matvec(state, v));
}
BENCHMARK(BM_GradientMatvec)->Arg(20)->Arg(50)->Arg(100);

void BM_GradientDense(benchmark::State& st) {
  const Dataset data = bench::square_dataset(st.range(0));
  const SolverState state(data, bench::warm_iterate(data));
  for (auto _ : st) benchmark::DoNotOptimize(gradient_dense(state));
}
BENCHMARK(BM_GradientDense)->Arg(20)->Arg(50)->Arg(100);

void BM_Objective(benchmark::State& st) {
  const Dataset data = bench::square_dataset(st.range(0));
  const SolverState state(data, bench::warm_iterate(data));
  for (auto _ : st) benchmark::DoNotOptimize(objective_value(state));
}
BENCHMARK(BM_Objective)->Arg(20)->Arg(50)->Arg(100);

void BM_AfwOracle(benchmark::State& st) {
  const Dataset data = bench::square_dataset(st.range(0));
  const SolverState state(data, bench::warm_iterate(data));
  EigConfig cfg;
  long matvecs = 0;
  for (auto _ : st) {
    const OracleResult r = afw_direction(state, cfg);
    matvecs += r.matvecs;
    benchmark::DoNotOptimize(r.direction.v.data());
  }
  st.counters["matvecs"] = benchmark::Counter(
      static_cast<double>(matvecs), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_AfwOracle)->Arg(20)->Arg(50);

void BM_GafwOracle(benchmark::State& st) {
  const Dataset data = bench::square_dataset(st.range(0));
  const SolverState state(data, bench::warm_iterate(data));
  const SpdMatrix root = spd_sqrt(state.q());
  EigConfig cfg;
  long matvecs = 0;
  for (auto _ : st) {
    const OracleResult r = gafw_direction(state, root, cfg);
    matvecs += r.matvecs;
    benchmark::DoNotOptimize(r.direction.v.data());
  }
  st.counters["matvecs"] = benchmark::Counter(
      static_cast<double>(matvecs), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_GafwOracle)->Arg(20)->Arg(50);

}  // namespace
}  // namespace tyler
