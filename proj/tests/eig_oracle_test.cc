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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"
#include "tyler/errors.h"
#include "tyler/linalg.h"

namespace tyler {
namespace {

using testing::random_dataset;
using testing::random_spd;

Matrix diag(std::initializer_list<double> values) {
  Vector d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) d[i++] = v;
  return d.asDiagonal();
}

LinearOperator dense_op(const Matrix& m) {
  return [m](const Vector& v) -> Vector { return m * v; };
}

// Dense checks of the three defining inequalities.
bool fw_certified(const Matrix& grad, const Direction& d, double beta) {
  const double p = static_cast<double>(grad.rows());
  return -d.rayleigh_grad >=
         -p * (1.0 - beta) * testing::eigenvalues(grad).minCoeff() - 1e-12;
}

bool afw_certified(const Matrix& grad, const Direction& d, double beta) {
  const double p = static_cast<double>(grad.rows());
  return std::abs(d.rayleigh_grad) >=
         p * (1.0 - beta) * testing::spectral_norm(grad) - 1e-12;
}

bool gafw_certified(const Matrix& grad, const Matrix& sqrt_q,
                    const Direction& d, double beta) {
  return std::abs(d.rayleigh_grad) / d.rayleigh_inv >=
         (1.0 - beta) * testing::spectral_norm(sqrt_q * grad * sqrt_q) -
             1e-12;
}

// Direction fields agree with the dense gradient and inverse.
void expect_consistent(const SolverState& state, const Direction& d) {
  const double p = static_cast<double>(state.dim());
  EXPECT_NEAR(d.v.norm(), std::sqrt(p), 1e-10);
  EXPECT_NEAR(d.rayleigh_grad, d.v.dot(gradient_dense(state) * d.v),
              1e-10 * std::max(1.0, std::abs(d.rayleigh_grad)));
  EXPECT_NEAR(d.rayleigh_inv, d.v.dot(state.q_inv() * d.v), 1e-10 * p);
  EXPECT_GT(d.rayleigh_inv, 1.0);
}

struct RandomState {
  Dataset data;
  SpdMatrix q;
};

RandomState random_state(Eigen::Index p, Eigen::Index n, std::uint64_t seed) {
  return {random_dataset(p, n, seed), random_spd(p, seed ^ 0x5eed)};
}

TEST(InternalSlackTest, SatisfiesReductionInequality) {
  EXPECT_DOUBLE_EQ(internal_slack(0.5), 0.2);
  for (double beta : {0.0, 0.1, 0.5, 0.9, 0.99}) {
    const double b = internal_slack(beta);
    EXPECT_GE((1.0 - 3.0 * b) / (1.0 - b), 1.0 - beta - 1e-15);
  }
}

TEST(PowerMethodTest, DefaultBudget) {
  EigConfig cfg;
  EXPECT_EQ(power_iteration_budget(8, cfg),
            8 * static_cast<int>(std::ceil(std::log(8.0 / 1e-6))));
  cfg.max_power_iters = 5;
  EXPECT_EQ(power_iteration_budget(8, cfg), 5);
}

TEST(PowerMethodTest, DiagonalOperator) {
  const Matrix m = diag({3.0, 1.0, 0.0});
  EigConfig cfg;
  cfg.rng_seed = 7;
  const PowerResult r = power_method(dense_op(m), 3, cfg);
  EXPECT_GE(r.lambda, 1.5);
  EXPECT_LE(r.lambda, 3.0 + 1e-12);
  EXPECT_NEAR(r.u.norm(), 1.0, 1e-12);
  EXPECT_LT(std::acos(std::min(1.0, std::abs(r.u[0]))), 0.5);
}

TEST(PowerMethodTest, ScaledIdentityAfterOneStep) {
  EigConfig cfg;
  cfg.max_power_iters = 1;
  for (std::uint64_t seed : {1, 2, 3}) {
    cfg.rng_seed = seed;
    const PowerResult r =
        power_method(dense_op(2.5 * Matrix::Identity(4, 4)), 4, cfg);
    EXPECT_NEAR(r.lambda, 2.5, 1e-15);
    EXPECT_EQ(r.iterations, 1);
  }
}

TEST(PowerMethodTest, RankOneOperatorConverges) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 5.0;
  EigConfig cfg;
  cfg.rayleigh_rtol = 0.0;
  cfg.max_power_iters = 50;
  const PowerResult r = power_method(dense_op(m), 4, cfg);
  EXPECT_NEAR(r.lambda, 5.0, 1e-6);
}

TEST(PowerMethodTest, ZeroOperatorIsFlagged) {
  EigConfig cfg;
  const PowerResult r = power_method(dense_op(Matrix::Zero(3, 3)), 3, cfg);
  EXPECT_TRUE(r.zero_operator);
  EXPECT_EQ(r.lambda, 0.0);
  EXPECT_NEAR(r.u.norm(), 1.0, 1e-12);
}

TEST(PowerMethodTest, DeterministicInSeed) {
  const Matrix m = random_spd(6, 3);
  EigConfig cfg;
  cfg.rng_seed = 99;
  const PowerResult a = power_method(dense_op(m), 6, cfg);
  const PowerResult b = power_method(dense_op(m), 6, cfg);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.lambda, b.lambda);
}

TEST(PowerMethodTest, ShiftedOperatorsArePositiveSemidefinite) {
  std::mt19937_64 rng(5);
  // Full budget, no early stop: the regime the randomized bound covers.
  const PowerOptions opts{power_iteration_budget(8, EigConfig{}), 0.0, 1e-14};
  const Matrix identity = Matrix::Identity(8, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = testing::random_symmetric(8, rng);
    const double c = estimate_operator_norm(dense_op(m), 8, opts, rng);
    EXPECT_LE(c, testing::spectral_norm(m) * (1.0 + 1e-12));
    const double shift = c / (1.0 - internal_slack(0.5));
    EXPECT_GE(testing::eigenvalues(shift * identity + m).minCoeff(), -1e-9);
    EXPECT_GE(testing::eigenvalues(shift * identity - m).minCoeff(), -1e-9);
  }
}

TEST(AfwOracleTest, InjectedDiagonalGradient) {
  const GradientView view =
      dense_gradient_view(diag({2.0, -1.0}), Matrix::Identity(2, 2));
  EigConfig cfg;
  cfg.beta = 0.5;
  cfg.rayleigh_rtol = 1e-12;
  const OracleResult r = afw_direction(view, cfg);
  ASSERT_EQ(r.status, OracleStatus::kOk);
  EXPECT_NEAR(std::abs(r.direction.v[0]), std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(r.direction.v[1], 0.0, 1e-5);
  EXPECT_NEAR(std::abs(r.direction.rayleigh_grad), 4.0, 1e-6);
  EXPECT_GE(std::abs(r.direction.rayleigh_grad), 2.0 * 0.5 * 2.0);
}

TEST(FwOracleTest, InjectedDiagonalGradient) {
  const GradientView view =
      dense_gradient_view(diag({1.0, -3.0}), Matrix::Identity(2, 2));
  EigConfig cfg;
  cfg.rayleigh_rtol = 1e-12;
  const OracleResult r = fw_direction(view, cfg);
  ASSERT_EQ(r.status, OracleStatus::kOk);
  EXPECT_NEAR(std::abs(r.direction.v[1]), std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(-r.direction.rayleigh_grad, 6.0, 1e-6);
  EXPECT_GE(-r.direction.rayleigh_grad, 2.0 * 0.5 * 3.0);
}

TEST(FwOracleTest, PositiveDefiniteGradientIsNotDescent) {
  const GradientView view =
      dense_gradient_view(diag({1.0, 2.0}), Matrix::Identity(2, 2));
  const OracleResult r = fw_direction(view, EigConfig{});
  EXPECT_EQ(r.status, OracleStatus::kNotDescent);
  EXPECT_GT(r.direction.rayleigh_grad, 0.0);
}

TEST(OracleTest, ConvergedAtOptimum) {
  const Dataset data(Matrix::Identity(2, 2), Provenance::kFile);
  SolverState state(data, Matrix::Identity(2, 2));
  const EigConfig cfg;
  EXPECT_EQ(afw_direction(state, cfg).status, OracleStatus::kConverged);
  EXPECT_EQ(fw_direction(state, cfg).status, OracleStatus::kConverged);
  EXPECT_EQ(gafw_direction(state, Matrix::Identity(2, 2), cfg).status,
            OracleStatus::kConverged);
}

TEST(OracleTest, RejectsInvalidBeta) {
  const GradientView view =
      dense_gradient_view(diag({1.0, -1.0}), Matrix::Identity(2, 2));
  EigConfig cfg;
  cfg.beta = 1.0;
  EXPECT_THROW(afw_direction(view, cfg), Error);
  EXPECT_THROW(fw_direction(view, cfg), Error);
}

TEST(OracleTest, CertificatesOnFiftySeededStates) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EigConfig cfg;
    cfg.rng_seed = seed;
    {
      const RandomState rs = random_state(8, 60, seed);
      SolverState state(rs.data, rs.q);
      const Matrix grad = gradient_dense(state);
      const OracleResult afw = afw_direction(state, cfg);
      EXPECT_TRUE(afw_certified(grad, afw.direction, cfg.beta)) << seed;
      expect_consistent(state, afw.direction);
      const OracleResult fw = fw_direction(state, cfg);
      EXPECT_EQ(fw.status, OracleStatus::kOk) << seed;
      EXPECT_TRUE(fw_certified(grad, fw.direction, cfg.beta)) << seed;
      expect_consistent(state, fw.direction);
    }
    {
      const RandomState rs = random_state(6, 40, seed + 1000);
      SolverState state(rs.data, rs.q);
      const SpdMatrix sqrt_q = spd_sqrt(rs.q);
      const OracleResult gafw = gafw_direction(state, sqrt_q, cfg);
      EXPECT_TRUE(gafw_certified(gradient_dense(state), sqrt_q,
                                 gafw.direction, cfg.beta))
          << seed;
      expect_consistent(state, gafw.direction);
    }
  }
}

TEST(OracleTest, CertificateRateOverThousandTrials) {
  int fw_ok = 0;
  int afw_ok = 0;
  int gafw_ok = 0;
  constexpr int kTrials = 1000;
  for (int trial = 0; trial < kTrials; ++trial) {
    const std::uint64_t seed = 5000 + static_cast<std::uint64_t>(trial);
    const RandomState rs = random_state(8, 60, seed);
    SolverState state(rs.data, rs.q);
    const Matrix grad = gradient_dense(state);
    const SpdMatrix sqrt_q = spd_sqrt(rs.q);
    EigConfig cfg;
    cfg.rng_seed = seed;
    fw_ok += fw_certified(grad, fw_direction(state, cfg).direction, cfg.beta);
    afw_ok +=
        afw_certified(grad, afw_direction(state, cfg).direction, cfg.beta);
    gafw_ok += gafw_certified(
        grad, sqrt_q, gafw_direction(state, sqrt_q, cfg).direction, cfg.beta);
  }
  EXPECT_GE(fw_ok, 990);
  EXPECT_GE(afw_ok, 990);
  EXPECT_GE(gafw_ok, 990);
}

TEST(OracleTest, DeterministicInSeed) {
  const RandomState rs = random_state(8, 60, 77);
  SolverState state(rs.data, rs.q);
  EigConfig cfg;
  cfg.rng_seed = 1234;
  const SpdMatrix sqrt_q = spd_sqrt(rs.q);
  EXPECT_EQ(afw_direction(state, cfg).direction.v,
            afw_direction(state, cfg).direction.v);
  EXPECT_EQ(fw_direction(state, cfg).direction.v,
            fw_direction(state, cfg).direction.v);
  EXPECT_EQ(gafw_direction(state, sqrt_q, cfg).direction.v,
            gafw_direction(state, sqrt_q, cfg).direction.v);
}

TEST(GafwOracleTest, IdentityIterateMatchesAfw) {
  const Dataset data = random_dataset(5, 30, 3);
  SolverState state(data, Matrix::Identity(5, 5));
  EigConfig cfg;
  cfg.rng_seed = 17;
  const OracleResult afw = afw_direction(state, cfg);
  const OracleResult gafw =
      gafw_direction(state, Matrix::Identity(5, 5), cfg);
  EXPECT_LT((afw.direction.v - gafw.direction.v).norm(), 1e-12);
  EXPECT_NEAR(afw.direction.rayleigh_grad, gafw.direction.rayleigh_grad,
              1e-12);
}

TEST(GafwOracleTest, DiagonalWinnerMaximizesScaledEntry) {
  const Matrix q = diag({1.5, 0.5});
  const Matrix sqrt_q = diag({std::sqrt(1.5), std::sqrt(0.5)});
  const Matrix q_inv = diag({1.0 / 1.5, 2.0});
  struct Case {
    Matrix grad;
    int winner;
  };
  // |q_jj g_jj|: (1.5, 1.0) and (1.5, 2.0).
  EigConfig cfg;
  cfg.rayleigh_rtol = 1e-12;
  for (const Case& c : {Case{diag({1.0, -2.0}), 0}, Case{diag({1.0, -4.0}), 1}}) {
    const OracleResult r =
        gafw_direction(dense_gradient_view(c.grad, q_inv), sqrt_q, cfg);
    ASSERT_EQ(r.status, OracleStatus::kOk);
    EXPECT_NEAR(std::abs(r.direction.v[c.winner]), std::sqrt(2.0), 1e-5);
    const double scaled = std::abs(q(c.winner, c.winner) *
                                   c.grad(c.winner, c.winner));
    EXPECT_NEAR(std::abs(r.direction.progress()), scaled, 1e-5);
  }
}

TEST(GafwOracleTest, RejectsMisSizedRoot) {
  const GradientView view =
      dense_gradient_view(diag({1.0, -1.0}), Matrix::Identity(2, 2));
  EXPECT_THROW(gafw_direction(view, Matrix::Identity(3, 3), EigConfig{}),
               Error);
}

TEST(WarmStartTest, ReusesVectorsAndKeepsCertificate) {
  const RandomState rs = random_state(8, 60, 31);
  SolverState state(rs.data, rs.q);
  EigConfig cfg;
  WarmStart warm;
  const OracleResult cold = afw_direction(state, cfg, &warm);
  ASSERT_EQ(warm.plus.size(), 8);
  ASSERT_EQ(warm.minus.size(), 8);
  const OracleResult again = afw_direction(state, cfg, &warm);
  EXPECT_LT(again.matvecs, cold.matvecs);
  EXPECT_TRUE(afw_certified(gradient_dense(state), again.direction, cfg.beta));
}

}  // namespace
}  // namespace tyler
