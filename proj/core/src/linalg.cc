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

#include "tyler/linalg.h"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "tyler/errors.h"

namespace tyler {
namespace {

constexpr double kUnitNormTolerance = 1e-12;

void check_quad_forms(const Vector& quad_forms) {
  for (Eigen::Index i = 0; i < quad_forms.size(); ++i) {
    if (!(quad_forms[i] > 0.0)) {
      throw Error(ErrorCode::kNumericalBreakdown,
                  "x_i^T Q^{-1} x_i = " + std::to_string(quad_forms[i]) +
                      " is not positive at point " + std::to_string(i),
                  -1, i);
    }
  }
}

// 1 + gamma v^T Q^{-1} v, validated.
double sherman_morrison_denominator(double gamma, double v_qinv_v) {
  const double den = 1.0 + gamma * v_qinv_v;
  if (!(den > 0.0)) {
    throw Error(ErrorCode::kDenominatorNonPositive,
                "1 + gamma v^T Q^{-1} v = " + std::to_string(den));
  }
  return den;
}

void check_step(double mu) {
  if (!(mu < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "step size mu must be < 1, got " + std::to_string(mu));
  }
}

}  // namespace

Dataset::Dataset(Matrix points, Provenance provenance,
                 std::optional<std::uint64_t> seed)
    : points_(std::move(points)), provenance_(provenance), seed_(seed) {
  for (Eigen::Index i = 0; i < points_.cols(); ++i) {
    const double norm = points_.col(i).norm();
    if (norm == 0.0) {
      throw Error(ErrorCode::kZeroVectorInput,
                  "point " + std::to_string(i) + " is the zero vector", -1, i);
    }
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitNormTolerance) {
      throw Error(ErrorCode::kInvalidArgument,
                  "point " + std::to_string(i) + " does not have unit norm",
                  -1, i);
    }
  }
}

SolverState::SolverState(const Dataset& data, SpdMatrix q,
                         int refresh_interval)
    : data_(&data), q_(std::move(q)), refresh_interval_(refresh_interval) {
  if (q_.rows() != data.dim() || q_.cols() != data.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "Q must be " + std::to_string(data.dim()) + "x" +
                    std::to_string(data.dim()));
  }
  symmetrize(q_);
  refresh();
}

void SolverState::refresh() {
  q_inv_ = inverse_spd(q_);
  y_.noalias() = q_inv_ * data_->points();
  recompute_quad_forms();
}

void SolverState::set_cached_y(Matrix y) {
  if (y.rows() != y_.rows() || y.cols() != y_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "cached y has wrong shape");
  }
  y_ = std::move(y);
  recompute_quad_forms();
}

void SolverState::recompute_quad_forms() {
  quad_forms_ = (data_->points().array() * y_.array()).colwise().sum();
}

void SolverState::apply_step(const Vector& v, double mu, double gamma) {
  check_step(mu);
  update_cached_y(*this, v, mu, gamma);
  q_inv_ = rank_one_inverse_update(q_inv_, v, mu, gamma);
  q_ *= (1.0 - mu);
  q_.noalias() += mu * v * v.transpose();
  symmetrize(q_);
  ++t_;
  if (refresh_interval_ > 0 && t_ % refresh_interval_ == 0) refresh();
}

void symmetrize(Matrix& m) {
  m = 0.5 * (m + m.transpose()).eval();
}

double log_det_spd(const SpdMatrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kPositiveDefinitenessLost,
                "Cholesky factorization failed");
  }
  const auto diag = llt.matrixLLT().diagonal();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag[i] > 0.0)) {
      throw Error(ErrorCode::kPositiveDefinitenessLost,
                  "non-positive Cholesky pivot");
    }
    sum += std::log(diag[i]);
  }
  return 2.0 * sum;
}

SpdMatrix inverse_spd(const SpdMatrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kPositiveDefinitenessLost,
                "Cholesky factorization failed");
  }
  SpdMatrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  symmetrize(inv);
  return inv;
}

bool is_positive_definite(const SpdMatrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return false;
  return (llt.matrixLLT().diagonal().array() > 0.0).all();
}

SpdMatrix spd_sqrt(const SpdMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalBreakdown, "eigendecomposition failed");
  }
  const Vector& values = eig.eigenvalues();
  if (!(values.minCoeff() > 0.0)) {
    throw Error(ErrorCode::kPositiveDefinitenessLost,
                "matrix has a non-positive eigenvalue");
  }
  const Matrix& vecs = eig.eigenvectors();
  SpdMatrix root =
      vecs * values.array().sqrt().matrix().asDiagonal() * vecs.transpose();
  symmetrize(root);
  return root;
}

double objective_value(const SolverState& state) {
  const Vector& quad = state.quad_forms();
  check_quad_forms(quad);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < quad.size(); ++i) sum += std::log(quad[i]);
  const double p = static_cast<double>(state.dim());
  const double n = static_cast<double>(quad.size());
  return (p / n) * sum + log_det_spd(state.q());
}

SpdMatrix gradient_dense(const SolverState& state) {
  const Vector& quad = state.quad_forms();
  check_quad_forms(quad);
  const double p = static_cast<double>(state.dim());
  const double n = static_cast<double>(quad.size());
  const Vector weights = quad.cwiseInverse();
  SpdMatrix grad = state.q_inv();
  grad.noalias() -=
      (p / n) * state.y() * weights.asDiagonal() * state.y().transpose();
  symmetrize(grad);
  return grad;
}

Vector gradient_matvec(const SolverState& state, const Vector& v) {
  const Vector& quad = state.quad_forms();
  check_quad_forms(quad);
  const double p = static_cast<double>(state.dim());
  const double n = static_cast<double>(quad.size());
  Vector coeffs = state.y().transpose() * v;
  coeffs.array() /= quad.array();
  Vector out = state.q_inv() * v;
  out.noalias() -= (p / n) * state.y() * coeffs;
  return out;
}

SpdMatrix rank_one_inverse_update(const SpdMatrix& q_inv, const Vector& v,
                                  double mu, double gamma) {
  check_step(mu);
  const Vector w = q_inv * v;
  const double den = sherman_morrison_denominator(gamma, v.dot(w));
  SpdMatrix out = q_inv;
  out.noalias() -= (gamma / den) * w * w.transpose();
  out /= (1.0 - mu);
  symmetrize(out);
  return out;
}

void update_cached_y(SolverState& state, const Vector& v, double mu,
                     double gamma) {
  check_step(mu);
  const Vector w = state.q_inv_ * v;
  const double den = sherman_morrison_denominator(gamma, v.dot(w));
  const Eigen::RowVectorXd v_dot_y = v.transpose() * state.y_;
  state.y_.noalias() -= (gamma / den) * w * v_dot_y;
  state.y_ /= (1.0 - mu);
  state.recompute_quad_forms();
}

void refresh_state(SolverState& state) { state.refresh(); }

}  // namespace tyler
