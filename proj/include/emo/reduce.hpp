#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <variant>

#include "emo/feature_matrix.hpp"

namespace emo {

class BinaryReader;
class BinaryWriter;

// Scales each nonzero row to unit L2 norm; zero rows are left alone. Keeps
// the storage kind of the input.
FeatureMatrix normalize_rows(const FeatureMatrix& m);

struct AllComponents {};
struct FixedComponents {
  std::size_t k;
};
// Keep the smallest k whose cumulative explained-variance ratio reaches `q`.
struct VarianceFraction {
  double q;
};
using ComponentCount = std::variant<AllComponents, FixedComponents, VarianceFraction>;

std::string describe(const ComponentCount& c);

struct ReductionConfig {
  bool normalize = true;
  ComponentCount components = AllComponents{};

  void validate() const;
};

struct PcaModel {
  Eigen::VectorXd mean;                      // length d
  Eigen::MatrixXd components;                // k x d, orthonormal rows
  Eigen::VectorXd explained_variance;        // length k, non-increasing
  Eigen::VectorXd explained_variance_ratio;  // length k

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
  std::size_t n_components() const noexcept { return static_cast<std::size_t>(components.rows()); }

  void save(BinaryWriter& w) const;
  static PcaModel load(BinaryReader& r);
};

// SVD of the mean-centered matrix (sparse input is densified first). Each
// component is sign-flipped so its largest-magnitude entry is non-negative.
// Requires at least two rows; throws ConfigError when k exceeds min(n, d).
PcaModel fit_pca(const FeatureMatrix& m, const ComponentCount& components = AllComponents{});

// (m - mean) * components^T. Throws ShapeError on a width mismatch.
DenseMatrix transform_pca(const FeatureMatrix& m, const PcaModel& model);

// Maps projected rows back to centered input coordinates: y * components.
DenseMatrix inverse_transform_centered(const DenseMatrix& projected, const PcaModel& model);

}  // namespace emo
