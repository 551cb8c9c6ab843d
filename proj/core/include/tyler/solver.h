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

#ifndef TYLER_SOLVER_H_
#define TYLER_SOLVER_H_

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "tyler/eig_oracle.h"
#include "tyler/errors.h"
#include "tyler/linalg.h"

namespace tyler {

enum class Variant { kFw, kAfw, kGafw, kFpi };

std::string_view VariantName(Variant variant);
std::optional<Variant> ParseVariant(std::string_view name);

// Per-iteration cost normalized by the data size n p. A gradient
// matrix-vector product is O(np), so it costs `matvec_unit`; the O(np) cache
// update of a Frank-Wolfe step costs 1; GAFW's O(p^3) square root costs
// p^2 / n; an FPI iteration, O(np^2), costs p.
struct CostModel {
  double matvec_unit = 1.0;

  double iteration_cost(Variant variant, int matvecs, Eigen::Index p,
                        Eigen::Index n) const;
};

// Q* and f(Q*) from a long reference run; lets trace rows report the
// optimality gap and the spectral distance to Q*.
struct ReferenceSolution {
  SpdMatrix q_star;
  double f_star = 0.0;
};

struct SolveConfig {
  Variant variant = Variant::kAfw;
  // Oracle slack; overrides eig.beta.
  double beta = 0.5;
  // 0 selects 10 p ceil(log(1 / tol_residual)).
  long max_iters = 0;
  // Stop once ||Q - (p/n) sum x x^T / x^T Q^{-1} x||_2 <= tol_residual.
  double tol_residual = 1e-6;
  EigConfig eig;
  int refresh_interval = SolverState::kDefaultRefreshInterval;
  bool record_trace = true;
  // Starting point, rescaled to trace p; identity when absent.
  std::optional<SpdMatrix> initial_q;
  std::optional<ReferenceSolution> reference;
  // Stop once the cumulative normalized cost reaches this budget.
  double max_cost_units = std::numeric_limits<double>::infinity();
  CostModel cost;
  // Run even when the data fails the necessary existence conditions.
  bool skip_assumption_check = false;
  // Start each oracle's power iterations from the previous iteration's
  // eigenvector estimates.
  bool warm_start = true;
};

long default_max_iters(Eigen::Index p, double tol_residual);

// One row per iteration. Row t describes the iterate Q_t reached by step t;
// l_t and mu_t are the progress measure and step size of the step that
// produced it. The initial row (t = 0) has NaN l_t and mu_t. Fields that need
// a reference solution are NaN without one.
struct TraceRow {
  long t = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double spectral_dist = std::numeric_limits<double>::quiet_NaN();
  double residual_spectral = std::numeric_limits<double>::quiet_NaN();
  double residual_min_eig = std::numeric_limits<double>::quiet_NaN();
  double l_t = std::numeric_limits<double>::quiet_NaN();
  double mu_t = std::numeric_limits<double>::quiet_NaN();
  // Normalized cost of this step, and cumulative cost up to and including it.
  double step_cost = 0.0;
  double cost_units = 0.0;
  int oracle_matvecs = 0;
  // FW step fell back to the AFW oracle.
  bool fallback = false;
};

struct SolveResult {
  SpdMatrix q_final;
  long iters = 0;
  bool converged = false;
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  TraceRow initial;
  std::vector<TraceRow> trace;
  // Total gradient matrix-vector products spent inside the oracles.
  long oracle_stats = 0;
};

// An iteration error raised inside solve(), carrying the trace so far.
class SolveFailure : public Error {
 public:
  SolveFailure(const Error& cause, SolveResult partial);
  const SolveResult& partial() const { return partial_; }

 private:
  SolveResult partial_;
};

struct StepSize {
  double mu = 0.0;
  double gamma = 0.0;
};

// mu = -a / (b^2 - a), gamma = -a / b^2 with a = v^T grad v and
// b = v^T Q^{-1} v. Throws DenominatorNonPositive if b^2 - a <= 0.
StepSize step_size(const Direction& d);

struct StepOutcome {
  // The oracle found a numerically zero gradient; the state is unchanged.
  bool converged = false;
  TraceRow row;
  Direction direction;
};

// One Frank-Wolfe iteration (FW, AFW or GAFW per cfg.variant). For GAFW,
// `sqrt_q` may supply Q^{1/2}; otherwise it is computed. Fills the
// diagnostic columns of the row when cfg.record_trace is set.
StepOutcome iterate_once(SolverState& state, const SolveConfig& cfg,
                         const SpdMatrix* sqrt_q = nullptr,
                         WarmStart* warm = nullptr);

// Runs the configured variant from cfg.initial_q (or I). Throws
// AssumptionCheckFailed when the data is rank deficient or n <= p (unless
// cfg.skip_assumption_check), and SolveFailure on iteration errors.
SolveResult solve(const Dataset& data, const SolveConfig& cfg);

// Fixed-point iterations. Iterates are reported trace-normalized to p.
SolveResult fpi_solve(const Dataset& data, const SolveConfig& cfg);
SolveResult fpi_solve(const Dataset& data, long max_iters,
                      double tol_residual);

// (p/n) sum_i x_i x_i^T / (x_i^T Q^{-1} x_i), not normalized.
SpdMatrix fpi_step(const SolverState& state);

// Q - (p/n) sum_i x_i x_i^T / (x_i^T y_i).
SpdMatrix tme_residual_matrix(const SolverState& state);
double tme_residual_spectral(const SolverState& state);
double tme_residual_min_eig(const SolverState& state);

// Power-method estimate of tme_residual_spectral in O(np) per step; never
// larger than the exact value (up to rounding).
double tme_residual_estimate(const SolverState& state, const EigConfig& cfg);

// Objective, residuals and (with a reference) gap and spectral distance for
// the current iterate.
void fill_diagnostics(const SolverState& state, const SolveConfig& cfg,
                      TraceRow& row);

}  // namespace tyler

#endif  // TYLER_SOLVER_H_
