#include <gtest/gtest.h>

#include <random>

#include "emo/error.hpp"
#include "emo/reduce.hpp"
#include "support/oracles.hpp"

using namespace emo;

namespace {

DenseMatrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
  DenseMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

DenseMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

}  // namespace

TEST(Reduce, NormalizeRows) {
  const auto out = normalize_rows(FeatureMatrix(matrix({{3, 4}, {0, 0}}))).dense();
  EXPECT_DOUBLE_EQ(out(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(out(0, 1), 0.8);
  EXPECT_EQ(out(1, 0), 0.0);
  EXPECT_EQ(out(1, 1), 0.0);

  std::mt19937_64 rng(3);
  const auto r = normalize_rows(FeatureMatrix(random_matrix(rng, 10, 5))).dense();
  for (Eigen::Index i = 0; i < r.rows(); ++i) EXPECT_NEAR(r.row(i).norm(), 1.0, 1e-12);
}

TEST(Reduce, NormalizeKeepsSparseStorage) {
  const auto s = make_sparse(3, {{{0, 3.0}, {2, 4.0}}, {}});
  const auto out = normalize_rows(FeatureMatrix(s));
  ASSERT_TRUE(out.is_sparse());
  EXPECT_DOUBLE_EQ(out.value(0, 2), 0.8);
  EXPECT_EQ(out.squared_norm(1), 0.0);
}

TEST(Reduce, RankOneData) {
  const auto model = fit_pca(FeatureMatrix(matrix({{1, 1}, {2, 2}, {3, 3}})));
  EXPECT_NEAR(std::abs(model.components(0, 0)), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(std::abs(model.components(0, 1)), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(model.explained_variance_ratio(0), 1.0, 1e-12);
  EXPECT_NEAR(model.explained_variance_ratio(1), 0.0, 1e-12);
}

TEST(Reduce, FourPointExample) {
  const auto model = fit_pca(FeatureMatrix(matrix({{2, 0}, {-2, 0}, {0, 1}, {0, -1}})));
  ASSERT_EQ(model.n_components(), 2u);
  EXPECT_NEAR(model.components(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(model.components(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(model.components(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(model.components(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(model.explained_variance(0), 8.0 / 3.0, 1e-12);
  EXPECT_NEAR(model.explained_variance(1), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(model.explained_variance_ratio(0), 0.8, 1e-9);
  EXPECT_NEAR(model.explained_variance_ratio(1), 0.2, 1e-9);
}

TEST(Reduce, MatchesJacobiEigendecomposition) {
  std::mt19937_64 rng(8);
  const auto x = random_matrix(rng, 8, 5);
  const auto model = fit_pca(FeatureMatrix(x));
  oracle::Matrix rows(8, std::vector<double>(5));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 5; ++j) rows[i][j] = x(i, j);
  const auto eig = oracle::jacobi(oracle::covariance(rows));
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(model.explained_variance(k), eig.values[k], 1e-9);
    double dot = 0;
    for (int j = 0; j < 5; ++j) dot += model.components(k, j) * eig.vectors[k][j];
    const double sign = dot < 0 ? -1.0 : 1.0;
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(model.components(k, j), sign * eig.vectors[k][j], 1e-6);
  }
}

TEST(Reduce, ReconstructionAndMeanRow) {
  std::mt19937_64 rng(21);
  const auto x = random_matrix(rng, 9, 4);
  const auto model = fit_pca(FeatureMatrix(x));
  const auto y = transform_pca(FeatureMatrix(x), model);
  const auto back = inverse_transform_centered(y, model);
  const DenseMatrix centered = x.rowwise() - model.mean.transpose();
  EXPECT_LT((back - centered).cwiseAbs().maxCoeff(), 1e-8);

  DenseMatrix mean_row = model.mean.transpose();
  EXPECT_LT(transform_pca(FeatureMatrix(mean_row), model).cwiseAbs().maxCoeff(), 1e-12);

  const auto held = random_matrix(rng, 1, 4);
  const auto projected = transform_pca(FeatureMatrix(held), model);
  for (Eigen::Index k = 0; k < 4; ++k) {
    double expected = 0;
    for (Eigen::Index j = 0; j < 4; ++j) expected += (held(0, j) - model.mean(j)) * model.components(k, j);
    EXPECT_NEAR(projected(0, k), expected, 1e-8);
  }
}

TEST(Reduce, ComponentSelection) {
  std::mt19937_64 rng(4);
  const FeatureMatrix x(random_matrix(rng, 10, 6));
  EXPECT_EQ(fit_pca(x, FixedComponents{3}).n_components(), 3u);
  const auto frac = fit_pca(x, VarianceFraction{0.5});
  const auto full = fit_pca(x);
  double cum = 0;
  std::size_t k = 0;
  while (cum < 0.5) cum += full.explained_variance_ratio(static_cast<Eigen::Index>(k++));
  EXPECT_EQ(frac.n_components(), k);
  EXPECT_THROW(fit_pca(x, FixedComponents{7}), ConfigError);
  EXPECT_THROW(fit_pca(FeatureMatrix(random_matrix(rng, 1, 3))), ShapeError);
}

TEST(Reduce, WidthMismatchIsShapeError) {
  std::mt19937_64 rng(4);
  const auto model = fit_pca(FeatureMatrix(random_matrix(rng, 5, 3)));
  EXPECT_THROW(transform_pca(FeatureMatrix(random_matrix(rng, 2, 4)), model), ShapeError);
}

TEST(Reduce, SparseInputMatchesDense) {
  const auto s = make_sparse(4, {{{0, 1.0}, {3, 2.0}}, {{1, 5.0}}, {{0, -1.0}, {2, 1.0}}, {}});
  const FeatureMatrix sparse(s);
  const FeatureMatrix dense(sparse.to_dense());
  const auto a = fit_pca(sparse), b = fit_pca(dense);
  EXPECT_LT((a.components - b.components).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((transform_pca(sparse, a) - transform_pca(dense, b)).cwiseAbs().maxCoeff(), 1e-12);
}
