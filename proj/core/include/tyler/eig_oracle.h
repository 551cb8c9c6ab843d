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

#ifndef TYLER_EIG_ORACLE_H_
#define TYLER_EIG_ORACLE_H_

#include <cstdint>
#include <functional>
#include <random>

#include "tyler/linalg.h"

namespace tyler {

struct EigConfig {
  // Oracle slack beta in [0, 1).
  double beta = 0.5;
  // Cap on power iterations per eigen-solve; 0 selects
  // 8 * ceil(log(p / delta)).
  int max_power_iters = 0;
  std::uint64_t rng_seed = 0;
  // Failure probability used by the default iteration cap.
  double delta = 1e-6;
  // Stop a power iteration once the Rayleigh quotient grows by less than
  // this fraction of itself.
  double rayleigh_rtol = 1e-2;
  // Operators whose estimated norm falls at or below this are treated as zero.
  double zero_tol = 1e-14;
  // Multiplier cap on the FW-step inner budget relative to the AFW budget.
  int fw_budget_cap = 64;
};

// beta~ = beta / (2 + beta): the largest slack with
// (1 - 3 beta~) / (1 - beta~) >= 1 - beta.
double internal_slack(double beta);

// Resolved per-solve power iteration cap for dimension p.
int power_iteration_budget(Eigen::Index p, const EigConfig& cfg);

using LinearOperator = std::function<Vector(const Vector&)>;

struct PowerOptions {
  int max_iters = 100;
  double rtol = 1e-2;
  double zero_tol = 1e-14;
};

struct PowerResult {
  // u^T A u for the returned unit vector u.
  double lambda = 0.0;
  Vector u;
  // A u / ||A u|| for the returned u: where a resumed iteration starts.
  Vector next;
  // Operator applications performed.
  int iterations = 0;
  // Relative growth of the Rayleigh quotient at the last step (inf when
  // only one step was taken).
  double last_rel_change = 0.0;
  // A u vanished; lambda is 0 and u is the start vector.
  bool zero_operator = false;
};

// Power iteration on a symmetric PSD operator from a Gaussian random start
// (or from `start` when given). `start_image`, if given, must be
// apply(start) and saves the first application.
PowerResult power_method(const LinearOperator& apply, Eigen::Index dim,
                         const PowerOptions& opts, std::mt19937_64& rng,
                         const Vector* start = nullptr,
                         const Vector* start_image = nullptr);

// Estimate of ||A||_2 for a symmetric operator: power iteration on A that
// tracks ||A u|| = sqrt(u^T A^2 u), one application per step. Returns the
// estimate and the unit vector it was measured at; `applications` (if given)
// receives the number of operator calls.
double estimate_operator_norm(const LinearOperator& apply, Eigen::Index dim,
                              const PowerOptions& opts, std::mt19937_64& rng,
                              Vector* u = nullptr, int* applications = nullptr);

// Seeds its own generator from cfg.rng_seed and uses the config budget.
PowerResult power_method(const LinearOperator& apply, Eigen::Index dim,
                         const EigConfig& cfg);

enum class DirectionKind { kFw, kAfw, kGafw };

struct Direction {
  // ||v|| = sqrt(p).
  Vector v;
  double rayleigh_grad = 0.0;  // v^T grad f(Q) v
  double rayleigh_inv = 0.0;   // v^T Q^{-1} v
  DirectionKind kind = DirectionKind::kAfw;

  // L_t = v^T grad f v / v^T Q^{-1} v.
  double progress() const { return rayleigh_grad / rayleigh_inv; }
};

enum class OracleStatus {
  kOk,
  // The gradient (or geodesic gradient) is numerically zero.
  kConverged,
  // FW only: no descent direction was certified within budget.
  kNotDescent,
};

struct OracleResult {
  OracleStatus status = OracleStatus::kOk;
  Direction direction;
  // Gradient matrix-vector products spent.
  int matvecs = 0;
};

// Eigenvector estimates carried from one oracle call to the next within a
// solve, used as power iteration starts. With a warm start the magnitude
// oracles take C from the two previous extreme directions instead of a
// separate norm estimate. Empty or mis-sized members mean random starts.
struct WarmStart {
  Vector norm;
  Vector plus;
  Vector minus;
};

// What the oracles need from an iterate: products with grad f(Q) and the
// quadratic form of Q^{-1}. Built from a SolverState, or from dense matrices
// in tests.
struct GradientView {
  Eigen::Index dim = 0;
  LinearOperator gradient;
  std::function<double(const Vector&)> inverse_form;
};

GradientView gradient_view(const SolverState& state);
GradientView dense_gradient_view(const SpdMatrix& gradient,
                                 const SpdMatrix& q_inv);

// |v^T grad v| >= p (1 - beta) ||grad||_2.
OracleResult afw_direction(const GradientView& view, const EigConfig& cfg,
                           WarmStart* warm = nullptr);
OracleResult afw_direction(const SolverState& state, const EigConfig& cfg,
                           WarmStart* warm = nullptr);

// -v^T grad v >= -p (1 - beta) lambda_min(grad).
OracleResult fw_direction(const GradientView& view, const EigConfig& cfg,
                           WarmStart* warm = nullptr);
OracleResult fw_direction(const SolverState& state, const EigConfig& cfg,
                           WarmStart* warm = nullptr);

// |v^T grad v| / v^T Q^{-1} v >= (1 - beta) ||Q^{1/2} grad Q^{1/2}||_2.
OracleResult gafw_direction(const GradientView& view, const SpdMatrix& sqrt_q,
                            const EigConfig& cfg, WarmStart* warm = nullptr);
OracleResult gafw_direction(const SolverState& state, const SpdMatrix& sqrt_q,
                            const EigConfig& cfg, WarmStart* warm = nullptr);

}  // namespace tyler

#endif  // TYLER_EIG_ORACLE_H_
