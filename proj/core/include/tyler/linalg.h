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

#ifndef TYLER_LINALG_H_
#define TYLER_LINALG_H_

#include <cstdint>
#include <optional>

#include <Eigen/Core>

namespace tyler {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A symmetric p x p matrix. Symmetry is maintained by the routines that
// write one (they mirror or symmetrize); positive definiteness is checked
// where it matters, via Cholesky.
using SpdMatrix = Eigen::MatrixXd;

enum class Provenance {
  kFile,
  kGaussianContaminated,
  kMultivariateT,
  kSphereUniform,
};

// n unit-norm points in R^p stored as the columns of a p x n matrix.
// Construct through tyler::normalize (dataset.h); the constructor enforces
// that no column is zero and every column has unit norm within 1e-12.
class Dataset {
 public:
  Dataset(Matrix points, Provenance provenance,
          std::optional<std::uint64_t> seed = std::nullopt);

  Eigen::Index dim() const { return points_.rows(); }
  Eigen::Index size() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  auto point(Eigen::Index i) const { return points_.col(i); }
  Provenance provenance() const { return provenance_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

 private:
  Matrix points_;
  Provenance provenance_;
  std::optional<std::uint64_t> seed_;
};

// Mutable iterate of the Frank-Wolfe solvers: Q, its maintained inverse, and
// the cached vectors y_i = Q^{-1} x_i (stored as the columns of y()).
//
// The dataset is held by reference and must outlive the state. A state is
// single-owner: const methods may be shared across threads, mutation may not.
class SolverState {
 public:
  static constexpr int kDefaultRefreshInterval = 50;

  // Factors q, builds q_inv and y from scratch. Throws
  // PositiveDefinitenessLost if q is not PD.
  SolverState(const Dataset& data, SpdMatrix q,
              int refresh_interval = kDefaultRefreshInterval);

  const Dataset& data() const { return *data_; }
  Eigen::Index dim() const { return q_.rows(); }
  const SpdMatrix& q() const { return q_; }
  const SpdMatrix& q_inv() const { return q_inv_; }
  const Matrix& y() const { return y_; }
  // x_i^T y_i for every point; refreshed whenever y changes.
  const Vector& quad_forms() const { return quad_forms_; }
  long t() const { return t_; }
  int refresh_interval() const { return refresh_interval_; }

  // Q <- (1 - mu) Q + mu v v^T together with the Sherman-Morrison update of
  // Q^{-1} and of the cached y_i. Advances t and refreshes from scratch every
  // refresh_interval steps (a non-positive interval disables refresh).
  void apply_step(const Vector& v, double mu, double gamma);

  // Recompute q_inv (Cholesky) and y from q.
  void refresh();

  // Overwrite the cached y (e.g. to inject drift in tests).
  void set_cached_y(Matrix y);

 private:
  friend void update_cached_y(SolverState& state, const Vector& v, double mu,
                              double gamma);
  void recompute_quad_forms();

  const Dataset* data_;
  SpdMatrix q_;
  SpdMatrix q_inv_;
  Matrix y_;
  Vector quad_forms_;
  long t_ = 0;
  int refresh_interval_;
};

void symmetrize(Matrix& m);

// log det via Cholesky. Throws PositiveDefinitenessLost.
double log_det_spd(const SpdMatrix& m);

// Inverse via Cholesky, symmetrized. Throws PositiveDefinitenessLost.
SpdMatrix inverse_spd(const SpdMatrix& m);

// True when a Cholesky factorization of m succeeds.
bool is_positive_definite(const SpdMatrix& m);

// Symmetric square root through an eigendecomposition.
SpdMatrix spd_sqrt(const SpdMatrix& m);

// f(Q) = (p/n) sum_i log(x_i^T Q^{-1} x_i) + log det Q, using the cached y.
double objective_value(const SolverState& state);

// -(p/n) sum_i y_i y_i^T / (x_i^T y_i) + Q^{-1}. O(n p^2).
SpdMatrix gradient_dense(const SolverState& state);

// grad f(Q) v in O(np + p^2) using the cached y.
Vector gradient_matvec(const SolverState& state, const Vector& v);

// Inverse of (1 - mu) Q + mu v v^T given Q^{-1}, with gamma = mu / (1 - mu).
// Throws DenominatorNonPositive when 1 + gamma v^T Q^{-1} v <= 0.
SpdMatrix rank_one_inverse_update(const SpdMatrix& q_inv, const Vector& v,
                                  double mu, double gamma);

// Rewrites state.y for the step (mu, gamma, v). Must run while state.q_inv()
// is still the pre-step inverse.
void update_cached_y(SolverState& state, const Vector& v, double mu,
                     double gamma);

// Free-function spelling of SolverState::refresh.
void refresh_state(SolverState& state);

}  // namespace tyler

#endif  // TYLER_LINALG_H_
