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


#ifndef TYLER_BENCHMARKS_BENCH_DATA_H_
#define TYLER_BENCHMARKS_BENCH_DATA_H_

#include "tyler/dataset.h"
#include "tyler/linalg.h"
#include "tyler/solver.h"

namespace tyler::bench {

// Toeplitz(0.85) multivariate t data with n = p^2, as in the full-scale
// experiment.
inline Dataset square_dataset(Eigen::Index p) {
  GeneratorConfig cfg;
  cfg.p = p;
  cfg.n = p * p;
  cfg.family = Family::kMultivariateT;
  cfg.seed = 1;
  return generate(cfg);
}

// A non-optimal iterate: one fixed-point step from the identity.
inline SpdMatrix warm_iterate(const Dataset& data) {
  const Eigen::Index p = data.dim();
  SpdMatrix q = fpi_step(SolverState(data, SpdMatrix::Identity(p, p), 0));
  q *= static_cast<double>(p) / q.trace();
  return q;
}

}  // namespace tyler::bench

#endif  // TYLER_BENCHMARKS_BENCH_DATA_H_
