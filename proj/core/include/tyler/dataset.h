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

#ifndef TYLER_DATASET_H_
#define TYLER_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "tyler/linalg.h"

namespace tyler {

// Population shape matrix for the synthetic generators.
struct ShapeMatrixSpec {
  enum class Kind { kToeplitz, kIdentity, kExplicit };

  Kind kind = Kind::kToeplitz;
  double rho = 0.85;       // kToeplitz: entries rho^{|i-j|}, rho in (0, 1)
  SpdMatrix matrix;        // kExplicit

  static ShapeMatrixSpec Toeplitz(double rho);
  static ShapeMatrixSpec Identity();
  static ShapeMatrixSpec Explicit(SpdMatrix m);

  // The p x p matrix; throws PositiveDefinitenessLost if it is not PD.
  SpdMatrix realize(Eigen::Index p) const;
};

enum class Family { kGaussianContaminated, kMultivariateT, kSphereUniform };

std::string_view FamilyName(Family family);
// Accepts the names printed by FamilyName ("gaussian_contaminated",
// "multivariate_t", "sphere_uniform") plus the short aliases "gaussian", "t"
// and "sphere".
std::optional<Family> ParseFamily(std::string_view name);

struct GeneratorConfig {
  Eigen::Index p = 10;
  Eigen::Index n = 200;
  ShapeMatrixSpec shape = ShapeMatrixSpec::Toeplitz(0.85);
  Family family = Family::kSphereUniform;
  // Gaussian contamination: each point is replaced with probability
  // rate_numerator / p.
  double rate_numerator = 0.9;
  // Multivariate t degrees of freedom.
  double dof = 2.0;
  std::uint64_t seed = 0;

  // Throws InvalidArgument when n <= p, dof <= 0, or the contamination
  // probability leaves [0, 1].
  void validate() const;
};

// Scale each column to unit length. Columns already within 1e-14 of unit
// norm are kept bit-for-bit. Throws ZeroVectorInput naming the column.
Dataset normalize(const Matrix& points, Provenance provenance = Provenance::kFile,
                  std::optional<std::uint64_t> seed = std::nullopt);

// Unit eigenvector of the smallest eigenvalue of sigma, signed so that its
// first non-negligible component is positive.
Vector contamination_direction(const SpdMatrix& sigma);

// Samples before normalization (p x n), deterministic in cfg.seed.
Matrix generate_raw(const GeneratorConfig& cfg);

Dataset generate(const GeneratorConfig& cfg);

struct ConditionReport {
  bool rank_full = false;
  bool n_gt_p = false;
  bool n_ge_2p = false;
  // No line through the origin holds n / p or more of the points.
  bool lines_ok = false;
  Eigen::Index rank = 0;
  // Most points that coincide up to sign.
  Eigen::Index max_repeated = 0;

  // What solve() insists on.
  bool solvable() const { return rank_full && n_gt_p && lines_ok; }
};

// Necessary conditions for existence (and for the linear-rate regime). The
// numerical rank counts singular values above p * eps * sigma_max. Only
// exactly repeated points are considered for the line condition.
ConditionReport check_necessary_conditions(const Dataset& data);

// Text format: a "p n" header line, then n lines of p whitespace-separated
// decimals written with 17 significant digits.
Dataset load_points(const std::filesystem::path& path);
void save_points(const Dataset& data, const std::filesystem::path& path);

}  // namespace tyler

#endif  // TYLER_DATASET_H_
