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


// Wall-clock cost of one iteration of each method, for comparison with the
// normalized cost units (an FPI iteration is charged p units).

#include <benchmark/benchmark.h>

#include "bench_data.h"
#include "tyler/solver.h"

namespace tyler {
namespace {

void BM_FrankWolfeIteration(benchmark::State& st, Variant variant) {
  const Dataset data = bench::square_dataset(st.range(0));
  SolveConfig cfg;
  cfg.variant = variant;
  cfg.record_trace = false;
  const SpdMatrix start = bench::warm_iterate(data);
  SolverState state(data, start);
  WarmStart warm;
  for (auto _ : st) {
    const StepOutcome out = iterate_once(state, cfg, nullptr, &warm);
    if (out.converged || state.t() >= 200) {
      st.PauseTiming();
      state = SolverState(data, start);
      warm = WarmStart{};
      st.ResumeTiming();
    }
  }
}
BENCHMARK_CAPTURE(BM_FrankWolfeIteration, afw, Variant::kAfw)->Arg(20)->Arg(50);
BENCHMARK_CAPTURE(BM_FrankWolfeIteration, gafw, Variant::kGafw)->Arg(20)->Arg(50);

void BM_FpiIteration(benchmark::State& st) {
  const Dataset data = bench::square_dataset(st.range(0));
  const SolverState state(data, bench::warm_iterate(data));
  for (auto _ : st) {
    SpdMatrix next = fpi_step(state);
    next *= static_cast<double>(data.dim()) / next.trace();
    benchmark::DoNotOptimize(SolverState(data, std::move(next), 0).q().data());
  }
}
BENCHMARK(BM_FpiIteration)->Arg(20)->Arg(50);

}  // namespace
}  // namespace tyler
