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

#include "tyler/dataset.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "tyler/errors.h"

namespace tyler {
namespace {

constexpr double kKeepUnitTolerance = 1e-14;

std::vector<std::string> split_whitespace(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

bool parse_count(const std::string& token, long& out) {
  errno = 0;
  char* end = nullptr;
  const long value = std::strtol(token.c_str(), &end, 10);
  if (errno != 0 || end == token.c_str() || *end != '\0' || value <= 0) {
    return false;
  }
  out = value;
  return true;
}

}  // namespace

ShapeMatrixSpec ShapeMatrixSpec::Toeplitz(double rho) {
  ShapeMatrixSpec spec;
  spec.kind = Kind::kToeplitz;
  spec.rho = rho;
  return spec;
}

ShapeMatrixSpec ShapeMatrixSpec::Identity() {
  ShapeMatrixSpec spec;
  spec.kind = Kind::kIdentity;
  return spec;
}

ShapeMatrixSpec ShapeMatrixSpec::Explicit(SpdMatrix m) {
  ShapeMatrixSpec spec;
  spec.kind = Kind::kExplicit;
  spec.matrix = std::move(m);
  return spec;
}

SpdMatrix ShapeMatrixSpec::realize(Eigen::Index p) const {
  SpdMatrix m;
  switch (kind) {
    case Kind::kIdentity:
      m = SpdMatrix::Identity(p, p);
      break;
    case Kind::kToeplitz:
      if (!(rho > 0.0 && rho < 1.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "Toeplitz rho must lie in (0, 1)");
      }
      m.resize(p, p);
      for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
          m(i, j) = std::pow(rho, static_cast<double>(i > j ? i - j : j - i));
        }
      }
      break;
    case Kind::kExplicit:
      if (matrix.rows() != p || matrix.cols() != p) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "explicit shape matrix has the wrong dimension");
      }
      m = matrix;
      symmetrize(m);
      break;
  }
  if (!is_positive_definite(m)) {
    throw Error(ErrorCode::kPositiveDefinitenessLost,
                "shape matrix is not positive definite");
  }
  return m;
}

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kGaussianContaminated:
      return "gaussian_contaminated";
    case Family::kMultivariateT:
      return "multivariate_t";
    case Family::kSphereUniform:
      return "sphere_uniform";
  }
  return "unknown";
}

std::optional<Family> ParseFamily(std::string_view name) {
  if (name == "gaussian_contaminated" || name == "gaussian") {
    return Family::kGaussianContaminated;
  }
  if (name == "multivariate_t" || name == "t") return Family::kMultivariateT;
  if (name == "sphere_uniform" || name == "sphere") {
    return Family::kSphereUniform;
  }
  return std::nullopt;
}

void GeneratorConfig::validate() const {
  if (p <= 0 || n <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "p and n must be positive");
  }
  if (n <= p) {
    throw Error(ErrorCode::kInvalidArgument, "generator requires n > p");
  }
  if (family == Family::kMultivariateT && !(dof > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dof must be positive");
  }
  if (family == Family::kGaussianContaminated) {
    const double prob = rate_numerator / static_cast<double>(p);
    if (!(prob >= 0.0 && prob <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "contamination probability must lie in [0, 1]");
    }
  }
}

Dataset normalize(const Matrix& points, Provenance provenance,
                  std::optional<std::uint64_t> seed) {
  Matrix out = points;
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    const double norm = out.col(i).norm();
    if (norm == 0.0) {
      throw Error(ErrorCode::kZeroVectorInput,
                  "point " + std::to_string(i) + " is the zero vector", -1, i);
    }
    if (!std::isfinite(norm)) {
      throw Error(ErrorCode::kNonFiniteEntry,
                  "point " + std::to_string(i) + " has a non-finite entry",
                  -1, i);
    }
    if (std::abs(norm - 1.0) > kKeepUnitTolerance) out.col(i) /= norm;
  }
  return Dataset(std::move(out), provenance, seed);
}

Vector contamination_direction(const SpdMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  Vector dir = eig.eigenvectors().col(0);
  dir.normalize();
  for (Eigen::Index i = 0; i < dir.size(); ++i) {
    if (std::abs(dir[i]) > 1e-12) {
      if (dir[i] < 0.0) dir = -dir;
      break;
    }
  }
  return dir;
}

Matrix generate_raw(const GeneratorConfig& cfg) {
  cfg.validate();
  const Eigen::Index p = cfg.p;
  const Eigen::Index n = cfg.n;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(p, n);
  Vector z(p);

  if (cfg.family == Family::kSphereUniform) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < p; ++k) out(k, i) = normal(rng);
    }
    return out;
  }

  const SpdMatrix sigma = cfg.shape.realize(p);
  const Matrix factor = Eigen::LLT<Matrix>(sigma).matrixL();
  if (cfg.family == Family::kGaussianContaminated) {
    const Vector outlier = contamination_direction(sigma);
    std::bernoulli_distribution replace(cfg.rate_numerator /
                                        static_cast<double>(p));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < p; ++k) z[k] = normal(rng);
      out.col(i) = factor * z;
      if (replace(rng)) out.col(i) = outlier;
    }
    return out;
  }

  std::chi_squared_distribution<double> chi2(cfg.dof);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) z[k] = normal(rng);
    const double scale = std::sqrt(chi2(rng) / cfg.dof);
    out.col(i) = (factor * z) / scale;
  }
  return out;
}

Dataset generate(const GeneratorConfig& cfg) {
  Provenance provenance = Provenance::kSphereUniform;
  if (cfg.family == Family::kGaussianContaminated) {
    provenance = Provenance::kGaussianContaminated;
  } else if (cfg.family == Family::kMultivariateT) {
    provenance = Provenance::kMultivariateT;
  }
  return normalize(generate_raw(cfg), provenance, cfg.seed);
}

ConditionReport check_necessary_conditions(const Dataset& data) {
  ConditionReport report;
  const Eigen::Index p = data.dim();
  const Eigen::Index n = data.size();
  report.n_gt_p = n > p;
  report.n_ge_2p = n >= 2 * p;
  if (n == 0) return report;
  Eigen::BDCSVD<Matrix> svd(data.points());
  const Vector& sv = svd.singularValues();
  const double threshold = static_cast<double>(p) *
                           std::numeric_limits<double>::epsilon() *
                           sv.maxCoeff();
  report.rank = (sv.array() > threshold).count();
  report.rank_full = report.rank == p;

  std::map<std::vector<double>, Eigen::Index> counts;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> key(data.point(i).data(), data.point(i).data() + p);
    const auto lead = std::find_if(key.begin(), key.end(),
                                   [](double v) { return v != 0.0; });
    if (lead != key.end() && *lead < 0.0) {
      for (double& v : key) v = -v;
    }
    report.max_repeated = std::max(report.max_repeated, ++counts[key]);
  }
  report.lines_ok = report.max_repeated * p < n;
  return report;
}

Dataset load_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  std::string line;
  while (std::getline(in, line) && is_blank(line)) {
  }
  const std::vector<std::string> header = split_whitespace(line);
  long p = 0;
  long n = 0;
  if (header.size() != 2 || !parse_count(header[0], p) ||
      !parse_count(header[1], n)) {
    throw Error(ErrorCode::kMalformedHeader,
                "expected a \"p n\" header line in " + path.string());
  }

  Matrix points(p, n);
  long row = 0;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    if (row >= n) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "more than the declared " + std::to_string(n) + " rows",
                  row);
    }
    const std::vector<std::string> tokens = split_whitespace(line);
    if (static_cast<long>(tokens.size()) != p) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "row " + std::to_string(row) + " has " +
                      std::to_string(tokens.size()) + " entries, expected " +
                      std::to_string(p),
                  row);
    }
    for (long col = 0; col < p; ++col) {
      const char* text = tokens[col].c_str();
      char* end = nullptr;
      const double value = std::strtod(text, &end);
      if (end == text || *end != '\0') {
        throw Error(ErrorCode::kMalformedHeader,
                    "unparseable entry at row " + std::to_string(row) +
                        ", col " + std::to_string(col),
                    row, col);
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::kNonFiniteEntry,
                    "non-finite entry at row " + std::to_string(row) +
                        ", col " + std::to_string(col),
                    row, col);
      }
      points(col, row) = value;
    }
    ++row;
  }
  if (row != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "declared " + std::to_string(n) + " rows, found " +
                    std::to_string(row));
  }
  return normalize(points, Provenance::kFile);
}

void save_points(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
  out << data.dim() << ' ' << data.size() << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index k = 0; k < data.dim(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.points()(k, i));
      if (k > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::kIo, "failed writing " + path.string());
  }
}

}  // namespace tyler
