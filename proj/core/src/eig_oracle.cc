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

#include "tyler/eig_oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tyler/errors.h"

namespace tyler {
namespace {

Vector random_unit(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(dim);
  for (;;) {
    for (Eigen::Index i = 0; i < dim; ++i) u[i] = normal(rng);
    const double norm = u.norm();
    if (norm > 0.0) return u / norm;
  }
}

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "beta must lie in [0, 1), got " + std::to_string(beta));
  }
}

PowerOptions base_options(Eigen::Index dim, const EigConfig& cfg) {
  return {power_iteration_budget(dim, cfg), cfg.rayleigh_rtol, cfg.zero_tol};
}

// Estimate of ||A||_2 for symmetric A: power iteration on A tracking
// sqrt(u^T A^2 u) = ||A u||, one operator application per step.
struct MagnitudeEstimate {
  double norm = 0.0;
  Vector u;
  int applications = 0;
};

// Early stop for a monotonically growing sequence (Rayleigh quotients or
// ||A u||) that converges geometrically. The remaining growth is
// extrapolated from the ratio of the last two increments; the sequence is
// declared converged once increment and extrapolated remainder are both
// below rtol * |value| on two consecutive steps.
class GrowthMonitor {
 public:
  explicit GrowthMonitor(double rtol) : rtol_(rtol) {}

  // Feeds the next value; returns true once converged.
  bool update(double value) {
    if (count_++ == 0) {
      previous_ = value;
      return false;
    }
    const double step = value - previous_;
    double remaining = std::numeric_limits<double>::infinity();
    if (previous_step_ > 0.0 && step >= 0.0 && step < previous_step_) {
      const double ratio = step / previous_step_;
      remaining = step * ratio / (1.0 - ratio);
    }
    const double scale = std::max(std::abs(value), 1e-300);
    rel_change_ = std::max(step, remaining) / scale;
    const bool small = rel_change_ <= rtol_;
    const bool converged = small && (previous_small_ || step == 0.0);
    previous_small_ = small;
    previous_step_ = step;
    previous_ = value;
    return converged;
  }

  double rel_change() const { return rel_change_; }

 private:
  double rtol_;
  long count_ = 0;
  double previous_ = 0.0;
  double previous_step_ = 0.0;
  bool previous_small_ = false;
  double rel_change_ = std::numeric_limits<double>::infinity();
};

bool usable(const Vector& v, Eigen::Index dim) {
  return v.size() == dim && v.norm() > 0.0;
}

MagnitudeEstimate estimate_norm(const LinearOperator& apply, Eigen::Index dim,
                                const PowerOptions& opts, std::mt19937_64& rng,
                                const Vector* start = nullptr) {
  MagnitudeEstimate est;
  est.u = start != nullptr && usable(*start, dim)
              ? Vector(*start / start->norm())
              : random_unit(dim, rng);
  GrowthMonitor monitor(opts.rtol);
  for (int k = 1; k <= opts.max_iters; ++k) {
    const Vector w = apply(est.u);
    ++est.applications;
    const double norm = w.norm();
    if (!(norm > opts.zero_tol)) {
      est.norm = norm;
      return est;
    }
    est.norm = norm;
    if (monitor.update(norm)) return est;
    if (k == opts.max_iters) return est;
    est.u = w / norm;
  }
  return est;
}

// Shared three-stage reduction for the magnitude oracles: estimate
// C ~ ||A||_2, then top eigenvectors of c I + A and c I - A with
// c = C / (1 - beta~). Returns the candidate with the larger |u^T A u|.
struct MagnitudeCandidate {
  OracleStatus status = OracleStatus::kOk;
  Vector u;
  double rayleigh = 0.0;  // u^T A u
  int applications = 0;
};

MagnitudeCandidate magnitude_oracle(const LinearOperator& apply,
                                    Eigen::Index dim, const EigConfig& cfg,
                                    WarmStart* warm) {
  check_beta(cfg.beta);
  std::mt19937_64 rng(cfg.rng_seed);
  const PowerOptions opts = base_options(dim, cfg);
  MagnitudeCandidate out;

  const bool warmed = warm != nullptr && usable(warm->plus, dim) &&
                      usable(warm->minus, dim);
  Vector plus_start;
  Vector minus_start;
  Vector plus_image;
  Vector minus_image;
  double norm = 0.0;
  if (warmed) {
    plus_start = warm->plus.normalized();
    minus_start = warm->minus.normalized();
    plus_image = apply(plus_start);
    minus_image = apply(minus_start);
    out.applications += 2;
    norm = std::max(plus_image.norm(), minus_image.norm());
    out.u = plus_image.norm() >= minus_image.norm() ? plus_start : minus_start;
  } else {
    const MagnitudeEstimate est = estimate_norm(apply, dim, opts, rng);
    out.applications += est.applications;
    norm = est.norm;
    out.u = est.u;
  }
  if (norm <= cfg.zero_tol) {
    out.status = OracleStatus::kConverged;
    return out;
  }
  const double shift = norm / (1.0 - internal_slack(cfg.beta));

  int plus_apps = 0;
  const LinearOperator plus = [&](const Vector& x) -> Vector {
    ++plus_apps;
    return shift * x + apply(x);
  };
  int minus_apps = 0;
  const LinearOperator minus = [&](const Vector& x) -> Vector {
    ++minus_apps;
    return shift * x - apply(x);
  };
  PowerResult up;
  PowerResult down;
  if (warmed) {
    plus_image += shift * plus_start;
    minus_image = shift * minus_start - minus_image;
    up = power_method(plus, dim, opts, rng, &plus_start, &plus_image);
    down = power_method(minus, dim, opts, rng, &minus_start, &minus_image);
  } else {
    up = power_method(plus, dim, opts, rng);
    down = power_method(minus, dim, opts, rng);
  }
  out.applications += plus_apps + minus_apps;
  if (warm != nullptr) {
    warm->plus = up.next;
    warm->minus = down.next;
  }

  const double up_rayleigh = up.zero_operator ? -shift : up.lambda - shift;
  const double down_rayleigh =
      down.zero_operator ? shift : shift - down.lambda;
  if (std::abs(up_rayleigh) > std::abs(down_rayleigh)) {
    out.u = up.u;
    out.rayleigh = up_rayleigh;
  } else {
    out.u = down.u;
    out.rayleigh = down_rayleigh;
  }
  return out;
}

}  // namespace

double estimate_operator_norm(const LinearOperator& apply, Eigen::Index dim,
                              const PowerOptions& opts, std::mt19937_64& rng,
                              Vector* u, int* applications) {
  MagnitudeEstimate est = estimate_norm(apply, dim, opts, rng);
  if (u != nullptr) *u = std::move(est.u);
  if (applications != nullptr) *applications = est.applications;
  return est.norm;
}

double internal_slack(double beta) { return beta / (2.0 + beta); }

int power_iteration_budget(Eigen::Index p, const EigConfig& cfg) {
  if (cfg.max_power_iters > 0) return cfg.max_power_iters;
  const double logs =
      std::ceil(std::log(static_cast<double>(p) / cfg.delta));
  return std::max(1, 8 * static_cast<int>(logs));
}

PowerResult power_method(const LinearOperator& apply, Eigen::Index dim,
                         const PowerOptions& opts, std::mt19937_64& rng,
                         const Vector* start, const Vector* start_image) {
  PowerResult res;
  const double start_norm = start != nullptr ? start->norm() : 0.0;
  res.u = start != nullptr ? Vector(*start / start_norm)
                           : random_unit(dim, rng);
  res.last_rel_change = std::numeric_limits<double>::infinity();
  GrowthMonitor monitor(opts.rtol);
  for (int k = 1; k <= opts.max_iters; ++k) {
    const Vector w = k == 1 && start != nullptr && start_image != nullptr
                         ? Vector(*start_image / start_norm)
                         : apply(res.u);
    ++res.iterations;
    const double norm = w.norm();
    if (!(norm > opts.zero_tol)) {
      if (k == 1) {
        res.lambda = 0.0;
        res.zero_operator = true;
      }
      res.next = res.u;
      return res;
    }
    res.lambda = res.u.dot(w);
    res.next = w / norm;
    const bool converged = monitor.update(res.lambda);
    res.last_rel_change = monitor.rel_change();
    if (converged || k == opts.max_iters) return res;
    res.u = res.next;
  }
  return res;
}

PowerResult power_method(const LinearOperator& apply, Eigen::Index dim,
                         const EigConfig& cfg) {
  std::mt19937_64 rng(cfg.rng_seed);
  return power_method(apply, dim, base_options(dim, cfg), rng);
}

GradientView gradient_view(const SolverState& state) {
  GradientView view;
  view.dim = state.dim();
  view.gradient = [&state](const Vector& v) {
    return gradient_matvec(state, v);
  };
  view.inverse_form = [&state](const Vector& v) {
    return v.dot(state.q_inv() * v);
  };
  return view;
}

GradientView dense_gradient_view(const SpdMatrix& gradient,
                                 const SpdMatrix& q_inv) {
  GradientView view;
  view.dim = gradient.rows();
  view.gradient = [gradient](const Vector& v) -> Vector {
    return gradient * v;
  };
  view.inverse_form = [q_inv](const Vector& v) { return v.dot(q_inv * v); };
  return view;
}

OracleResult afw_direction(const GradientView& view, const EigConfig& cfg,
                           WarmStart* warm) {
  const MagnitudeCandidate cand =
      magnitude_oracle(view.gradient, view.dim, cfg, warm);
  OracleResult res;
  res.status = cand.status;
  res.matvecs = cand.applications;
  const double p = static_cast<double>(view.dim);
  res.direction.kind = DirectionKind::kAfw;
  res.direction.v = std::sqrt(p) * cand.u;
  res.direction.rayleigh_grad = p * cand.rayleigh;
  res.direction.rayleigh_inv = view.inverse_form(res.direction.v);
  return res;
}

OracleResult afw_direction(const SolverState& state, const EigConfig& cfg,
                           WarmStart* warm) {
  return afw_direction(gradient_view(state), cfg, warm);
}

OracleResult fw_direction(const GradientView& view, const EigConfig& cfg,
                          WarmStart* warm) {
  check_beta(cfg.beta);
  std::mt19937_64 rng(cfg.rng_seed);
  const PowerOptions opts = base_options(view.dim, cfg);
  OracleResult res;
  res.direction.kind = DirectionKind::kFw;
  const double p = static_cast<double>(view.dim);

  const MagnitudeEstimate est =
      estimate_norm(view.gradient, view.dim, opts, rng,
                    warm != nullptr ? &warm->norm : nullptr);
  res.matvecs += est.applications;
  if (warm != nullptr) warm->norm = est.u;
  if (est.norm <= cfg.zero_tol) {
    res.status = OracleStatus::kConverged;
    res.direction.v = std::sqrt(p) * est.u;
    res.direction.rayleigh_inv = view.inverse_form(res.direction.v);
    return res;
  }
  const double shift = est.norm / (1.0 - internal_slack(cfg.beta));
  int apps = 0;
  const LinearOperator minus = [&](const Vector& x) -> Vector {
    ++apps;
    return shift * x - view.gradient(x);
  };

  const Vector* minus_start = warm != nullptr && usable(warm->minus, view.dim)
                                  ? &warm->minus
                                  : nullptr;
  PowerResult down = power_method(minus, view.dim, opts, rng, minus_start);
  double rayleigh = down.zero_operator ? shift : shift - down.lambda;

  // Certifying the FW inequality needs relative accuracy ~ beta |lambda_p| /
  // (3 ||grad||) on the shifted operator. lambda_p is unknown, so the current
  // Rayleigh quotient stands in for it, both for the tolerance and for the
  // sqrt(||grad|| / |lambda_p|) budget multiplier.
  const double magnitude = std::abs(rayleigh);
  const double ratio = magnitude > 0.0 ? est.norm / magnitude
                                       : std::numeric_limits<double>::infinity();
  const double multiplier =
      std::min<double>(cfg.fw_budget_cap, std::max(1.0, std::sqrt(ratio)));
  const int extended_budget =
      static_cast<int>(std::ceil(multiplier * opts.max_iters));
  const double tight_rtol =
      cfg.rayleigh_rtol * std::min(1.0, cfg.beta / (3.0 * ratio));
  if ((rayleigh > 0.0 || down.last_rel_change > tight_rtol) &&
      extended_budget > down.iterations && !down.zero_operator) {
    PowerOptions more = opts;
    more.max_iters = extended_budget - down.iterations;
    more.rtol = tight_rtol;
    const PowerResult refined =
        power_method(minus, view.dim, more, rng, &down.next);
    if (!refined.zero_operator) {
      const int used = down.iterations;
      down = refined;
      down.iterations += used;
      rayleigh = shift - down.lambda;
    }
  }
  res.matvecs += apps;
  if (warm != nullptr) warm->minus = down.next;

  res.direction.v = std::sqrt(p) * down.u;
  res.direction.rayleigh_grad = p * rayleigh;
  res.direction.rayleigh_inv = view.inverse_form(res.direction.v);
  if (rayleigh > 0.0) res.status = OracleStatus::kNotDescent;
  return res;
}

OracleResult fw_direction(const SolverState& state, const EigConfig& cfg,
                          WarmStart* warm) {
  return fw_direction(gradient_view(state), cfg, warm);
}

OracleResult gafw_direction(const GradientView& view, const SpdMatrix& sqrt_q,
                            const EigConfig& cfg, WarmStart* warm) {
  if (sqrt_q.rows() != view.dim || sqrt_q.cols() != view.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "Q^{1/2} has wrong shape");
  }
  const LinearOperator geodesic = [&](const Vector& w) -> Vector {
    return sqrt_q * view.gradient(sqrt_q * w);
  };
  const MagnitudeCandidate cand =
      magnitude_oracle(geodesic, view.dim, cfg, warm);
  OracleResult res;
  res.status = cand.status;
  res.matvecs = cand.applications;
  res.direction.kind = DirectionKind::kGafw;
  const double p = static_cast<double>(view.dim);
  const Vector mapped = sqrt_q * cand.u;
  const double mapped_sq = mapped.squaredNorm();
  res.direction.v = std::sqrt(p / mapped_sq) * mapped;
  // v^T grad v = p u^T (S grad S) u / ||S u||^2.
  res.direction.rayleigh_grad = p * cand.rayleigh / mapped_sq;
  res.direction.rayleigh_inv = view.inverse_form(res.direction.v);
  return res;
}

OracleResult gafw_direction(const SolverState& state, const SpdMatrix& sqrt_q,
                            const EigConfig& cfg, WarmStart* warm) {
  return gafw_direction(gradient_view(state), sqrt_q, cfg, warm);
}

}  // namespace tyler
