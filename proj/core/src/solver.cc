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

#include "tyler/solver.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "tyler/dataset.h"

namespace tyler {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

EigConfig oracle_config(const SolveConfig& cfg, long t) {
  EigConfig eig = cfg.eig;
  eig.beta = cfg.beta;
  eig.rng_seed = splitmix64(cfg.eig.rng_seed ^ splitmix64(static_cast<std::uint64_t>(t)));
  return eig;
}

void validate(const SolveConfig& cfg) {
  if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must lie in [0, 1)");
  }
  if (!(cfg.tol_residual >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tol_residual must be >= 0");
  }
  if (cfg.max_iters < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 0");
  }
}

SpdMatrix starting_point(const Dataset& data, const SolveConfig& cfg) {
  const Eigen::Index p = data.dim();
  SpdMatrix q0 = cfg.initial_q ? *cfg.initial_q : SpdMatrix::Identity(p, p);
  if (q0.rows() != p || q0.cols() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "initial Q has wrong shape");
  }
  const double trace = q0.trace();
  if (!(trace > 0.0)) {
    throw Error(ErrorCode::kPositiveDefinitenessLost,
                "initial Q has non-positive trace");
  }
  q0 *= static_cast<double>(p) / trace;
  symmetrize(q0);
  return q0;
}

struct Residuals {
  double spectral;
  double min_eig;
};

Residuals residuals(const SolverState& state) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(tme_residual_matrix(state),
                                            Eigen::EigenvaluesOnly);
  const Vector& values = eig.eigenvalues();
  return {std::max(std::abs(values[0]), std::abs(values[values.size() - 1])),
          values[0]};
}

double spectral_norm_symmetric(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// Exact residual of the current state, reusing a freshly recorded row.
bool residual_within(const SolverState& state, const SolveConfig& cfg,
                     const TraceRow* last, long t) {
  if (last != nullptr && !std::isnan(last->residual_spectral)) {
    return last->residual_spectral <= cfg.tol_residual;
  }
  if (tme_residual_estimate(state, oracle_config(cfg, ~t)) >
      cfg.tol_residual) {
    return false;
  }
  return tme_residual_spectral(state) <= cfg.tol_residual;
}

}  // namespace

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kFw:
      return "fw";
    case Variant::kAfw:
      return "afw";
    case Variant::kGafw:
      return "gafw";
    case Variant::kFpi:
      return "fpi";
  }
  return "unknown";
}

std::optional<Variant> ParseVariant(std::string_view name) {
  if (name == "fw") return Variant::kFw;
  if (name == "afw") return Variant::kAfw;
  if (name == "gafw") return Variant::kGafw;
  if (name == "fpi") return Variant::kFpi;
  return std::nullopt;
}

double CostModel::iteration_cost(Variant variant, int matvecs,
                                 Eigen::Index p, Eigen::Index n) const {
  const double dp = static_cast<double>(p);
  if (variant == Variant::kFpi) return dp;
  double cost = 1.0 + matvecs * matvec_unit;
  if (variant == Variant::kGafw) cost += dp * dp / static_cast<double>(n);
  return cost;
}

long default_max_iters(Eigen::Index p, double tol_residual) {
  const double tol = tol_residual > 0.0 ? tol_residual : 1e-16;
  const double logs = std::ceil(std::log(1.0 / tol));
  return 10 * static_cast<long>(p) * std::max(1L, static_cast<long>(logs));
}

SolveFailure::SolveFailure(const Error& cause, SolveResult partial)
    : Error(cause.code(),
            std::string(cause.what())
                    .substr(ErrorCodeName(cause.code()).size() + 2) +
                " (after " +
                std::to_string(partial.iters) + " iterations)",
            cause.row(), cause.col()),
      partial_(std::move(partial)) {}

StepSize step_size(const Direction& d) {
  const double a = d.rayleigh_grad;
  const double b = d.rayleigh_inv;
  const double den = b * b - a;
  if (!(den > 0.0)) {
    throw Error(ErrorCode::kDenominatorNonPositive,
                "(v^T Q^{-1} v)^2 - v^T grad v = " + std::to_string(den));
  }
  if (a == 0.0) return {0.0, 0.0};
  return {-a / den, -a / (b * b)};
}

SpdMatrix tme_residual_matrix(const SolverState& state) {
  const Vector& quad = state.quad_forms();
  for (Eigen::Index i = 0; i < quad.size(); ++i) {
    if (!(quad[i] > 0.0)) {
      throw Error(ErrorCode::kNumericalBreakdown,
                  "x_i^T Q^{-1} x_i is not positive", -1, i);
    }
  }
  const Matrix& x = state.data().points();
  const double p = static_cast<double>(state.dim());
  const double n = static_cast<double>(x.cols());
  const Vector weights = quad.cwiseInverse();
  SpdMatrix m = state.q();
  m.noalias() -= (p / n) * x * weights.asDiagonal() * x.transpose();
  symmetrize(m);
  return m;
}

double tme_residual_spectral(const SolverState& state) {
  return residuals(state).spectral;
}

double tme_residual_min_eig(const SolverState& state) {
  return residuals(state).min_eig;
}

double tme_residual_estimate(const SolverState& state, const EigConfig& cfg) {
  const Matrix& x = state.data().points();
  const Vector& quad = state.quad_forms();
  const double scale =
      static_cast<double>(state.dim()) / static_cast<double>(x.cols());
  const LinearOperator residual = [&](const Vector& w) -> Vector {
    Vector coeffs = x.transpose() * w;
    coeffs.array() /= quad.array();
    Vector out = state.q() * w;
    out.noalias() -= scale * x * coeffs;
    return out;
  };
  std::mt19937_64 rng(cfg.rng_seed);
  const PowerOptions opts{power_iteration_budget(state.dim(), cfg),
                          cfg.rayleigh_rtol, 0.0};
  return estimate_operator_norm(residual, state.dim(), opts, rng);
}

void fill_diagnostics(const SolverState& state, const SolveConfig& cfg,
                      TraceRow& row) {
  row.objective = objective_value(state);
  const Residuals r = residuals(state);
  row.residual_spectral = r.spectral;
  row.residual_min_eig = r.min_eig;
  if (cfg.reference) {
    row.gap = row.objective - cfg.reference->f_star;
    row.spectral_dist = spectral_norm_symmetric(state.q() - cfg.reference->q_star);
  }
}

StepOutcome iterate_once(SolverState& state, const SolveConfig& cfg,
                         const SpdMatrix* sqrt_q, WarmStart* warm) {
  const EigConfig eig = oracle_config(cfg, state.t());
  OracleResult oracle;
  bool fallback = false;
  switch (cfg.variant) {
    case Variant::kFw:
      oracle = fw_direction(state, eig, warm);
      if (oracle.status == OracleStatus::kNotDescent) {
        const int spent = oracle.matvecs;
        oracle = afw_direction(state, eig, warm);
        oracle.matvecs += spent;
        fallback = true;
      }
      break;
    case Variant::kAfw:
      oracle = afw_direction(state, eig, warm);
      break;
    case Variant::kGafw:
      if (sqrt_q != nullptr) {
        oracle = gafw_direction(state, *sqrt_q, eig, warm);
      } else {
        oracle = gafw_direction(state, spd_sqrt(state.q()), eig, warm);
      }
      break;
    case Variant::kFpi:
      throw Error(ErrorCode::kInvalidArgument,
                  "iterate_once runs Frank-Wolfe variants only");
  }

  StepOutcome out;
  out.direction = oracle.direction;
  out.row.oracle_matvecs = oracle.matvecs;
  out.row.fallback = fallback;
  out.row.step_cost = cfg.cost.iteration_cost(
      cfg.variant, oracle.matvecs, state.dim(), state.data().size());
  out.row.cost_units = out.row.step_cost;
  if (oracle.status == OracleStatus::kConverged) {
    out.converged = true;
    out.row.t = state.t();
    return out;
  }

  const StepSize step = step_size(oracle.direction);
  out.row.l_t = oracle.direction.progress();
  out.row.mu_t = step.mu;
  state.apply_step(oracle.direction.v, step.mu, step.gamma);
  out.row.t = state.t();
  if (cfg.record_trace) fill_diagnostics(state, cfg, out.row);
  return out;
}

SolveResult solve(const Dataset& data, const SolveConfig& cfg) {
  validate(cfg);
  if (!cfg.skip_assumption_check) {
    const ConditionReport report = check_necessary_conditions(data);
    if (!report.solvable()) {
      std::string failed;
      if (!report.rank_full) failed += " rank_full";
      if (!report.n_gt_p) failed += " n_gt_p";
      if (!report.lines_ok) failed += " lines_ok";
      throw Error(ErrorCode::kAssumptionCheckFailed,
                  "necessary condition(s) failed:" + failed);
    }
  }
  if (cfg.variant == Variant::kFpi) return fpi_solve(data, cfg);

  const long max_iters = cfg.max_iters > 0
                             ? cfg.max_iters
                             : default_max_iters(data.dim(), cfg.tol_residual);
  SolverState state(data, starting_point(data, cfg), cfg.refresh_interval);
  SolveResult result;
  result.initial.t = 0;
  if (cfg.record_trace) fill_diagnostics(state, cfg, result.initial);

  double cumulative = 0.0;
  const TraceRow* last = cfg.record_trace ? &result.initial : nullptr;
  SpdMatrix sqrt_q;
  WarmStart warm;
  for (;;) {
    if (residual_within(state, cfg, last, result.iters)) {
      result.converged = true;
      break;
    }
    if (result.iters >= max_iters || cumulative >= cfg.max_cost_units) break;

    StepOutcome outcome;
    try {
      if (cfg.variant == Variant::kGafw) sqrt_q = spd_sqrt(state.q());
      outcome = iterate_once(state, cfg,
                             cfg.variant == Variant::kGafw ? &sqrt_q : nullptr,
                             cfg.warm_start ? &warm : nullptr);
    } catch (const Error& e) {
      result.q_final = state.q();
      throw SolveFailure(e, std::move(result));
    }
    result.oracle_stats += outcome.row.oracle_matvecs;
    if (outcome.converged) {
      result.converged = true;
      break;
    }
    cumulative += outcome.row.step_cost;
    outcome.row.cost_units = cumulative;
    ++result.iters;
    if (cfg.record_trace) {
      result.trace.push_back(outcome.row);
      last = &result.trace.back();
    }
  }
  result.q_final = state.q();
  result.final_residual = last != nullptr ? last->residual_spectral
                                          : tme_residual_spectral(state);
  return result;
}

SpdMatrix fpi_step(const SolverState& state) {
  const Vector& quad = state.quad_forms();
  for (Eigen::Index i = 0; i < quad.size(); ++i) {
    if (!(quad[i] > 0.0)) {
      throw Error(ErrorCode::kNumericalBreakdown,
                  "x_i^T Q^{-1} x_i is not positive", -1, i);
    }
  }
  const Matrix& x = state.data().points();
  const double p = static_cast<double>(state.dim());
  const double n = static_cast<double>(x.cols());
  const Vector weights = quad.cwiseInverse();
  SpdMatrix next = (p / n) * x * weights.asDiagonal() * x.transpose();
  symmetrize(next);
  return next;
}

SolveResult fpi_solve(const Dataset& data, const SolveConfig& cfg) {
  validate(cfg);
  const Eigen::Index p = data.dim();
  const long max_iters = cfg.max_iters > 0
                             ? cfg.max_iters
                             : default_max_iters(p, cfg.tol_residual);
  SolveResult result;
  SolverState state(data, starting_point(data, cfg), 0);
  result.initial.t = 0;
  fill_diagnostics(state, cfg, result.initial);

  double cumulative = 0.0;
  TraceRow current = result.initial;
  for (;;) {
    if (current.residual_spectral <= cfg.tol_residual) {
      result.converged = true;
      break;
    }
    if (result.iters >= max_iters || cumulative >= cfg.max_cost_units) break;
    try {
      SpdMatrix next = fpi_step(state);
      next *= static_cast<double>(p) / next.trace();
      state = SolverState(data, std::move(next), 0);
      ++result.iters;
      current = TraceRow{};
      current.t = result.iters;
      current.step_cost = cfg.cost.iteration_cost(Variant::kFpi, 0, p, data.size());
      cumulative += current.step_cost;
      current.cost_units = cumulative;
      fill_diagnostics(state, cfg, current);
    } catch (const Error& e) {
      result.q_final = state.q();
      throw SolveFailure(e, std::move(result));
    }
    if (cfg.record_trace) result.trace.push_back(current);
  }
  result.q_final = state.q();
  result.final_residual = current.residual_spectral;
  return result;
}

SolveResult fpi_solve(const Dataset& data, long max_iters,
                      double tol_residual) {
  SolveConfig cfg;
  cfg.variant = Variant::kFpi;
  cfg.max_iters = max_iters;
  cfg.tol_residual = tol_residual;
  return fpi_solve(data, cfg);
}

}  // namespace tyler
