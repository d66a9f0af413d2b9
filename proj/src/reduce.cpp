#include "emo/reduce.hpp"

#include <Eigen/SVD>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

#include "emo/binary_io.hpp"
#include "emo/error.hpp"

namespace emo {

FeatureMatrix normalize_rows(const FeatureMatrix& m) {
  if (m.is_sparse()) {
    SparseMatrix out = m.sparse();
    for (Eigen::Index r = 0; r < out.outerSize(); ++r) {
      double sq = 0.0;
      for (SparseMatrix::InnerIterator it(out, r); it; ++it) sq += it.value() * it.value();
      if (sq == 0.0) continue;
      const double norm = std::sqrt(sq);
      for (SparseMatrix::InnerIterator it(out, r); it; ++it) it.valueRef() /= norm;
    }
    return FeatureMatrix(std::move(out), m.provenance());
  }
  DenseMatrix out = m.dense();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).norm();
    if (norm > 0.0) out.row(r) /= norm;
  }
  return FeatureMatrix(std::move(out), m.provenance());
}

std::string describe(const ComponentCount& c) {
  struct {
    std::string operator()(const AllComponents&) const { return "all"; }
    std::string operator()(const FixedComponents& f) const { return std::to_string(f.k); }
    std::string operator()(const VarianceFraction& v) const { return "q=" + std::to_string(v.q); }
  } visitor;
  return std::visit(visitor, c);
}

void ReductionConfig::validate() const {
  if (const auto* f = std::get_if<FixedComponents>(&components); f && f->k == 0) {
    throw ConfigError("PCA component count must be positive");
  }
  if (const auto* v = std::get_if<VarianceFraction>(&components); v && !(v->q > 0.0 && v->q < 1.0)) {
    throw ConfigError("PCA variance fraction must lie in (0, 1)");
  }
}

void PcaModel::save(BinaryWriter& w) const {
  w.matrix(mean.transpose());
  w.matrix(components);
  w.matrix(explained_variance.transpose());
  w.matrix(explained_variance_ratio.transpose());
}

PcaModel PcaModel::load(BinaryReader& r) {
  PcaModel m;
  m.mean = r.matrix<Eigen::MatrixXd>().transpose();
  m.components = r.matrix<Eigen::MatrixXd>();
  m.explained_variance = r.matrix<Eigen::MatrixXd>().transpose();
  m.explained_variance_ratio = r.matrix<Eigen::MatrixXd>().transpose();
  if (m.components.cols() != m.mean.size() || m.explained_variance.size() != m.components.rows()) {
    throw FormatError("PCA model: inconsistent shapes");
  }
  return m;
}

PcaModel fit_pca(const FeatureMatrix& m, const ComponentCount& components) {
  const auto n = static_cast<Eigen::Index>(m.rows());
  const auto d = static_cast<Eigen::Index>(m.cols());
  if (n < 2) throw ShapeError("PCA needs at least two samples");
  if (d < 1) throw ShapeError("PCA needs at least one feature");
  const Eigen::Index max_k = std::min(n, d);

  if (m.is_sparse()) {
    spdlog::warn("PCA: densifying {}x{} sparse matrix (~{:.1f} MiB)", n, d,
                 static_cast<double>(n) * static_cast<double>(d) * sizeof(double) / (1024.0 * 1024.0));
  }
  Eigen::MatrixXd x = m.to_dense();
  PcaModel model;
  model.mean = x.colwise().mean().transpose();
  x.rowwise() -= model.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::VectorXd variance = s.array().square() / static_cast<double>(n - 1);
  const double total = variance.sum();
  const Eigen::VectorXd ratio = total > 0.0 ? Eigen::VectorXd(variance / total) : Eigen::VectorXd::Zero(variance.size());

  Eigen::Index k = max_k;
  if (const auto* f = std::get_if<FixedComponents>(&components)) {
    if (f->k == 0 || static_cast<Eigen::Index>(f->k) > max_k) {
      throw ConfigError("PCA: requested " + std::to_string(f->k) + " components, maximum is " + std::to_string(max_k));
    }
    k = static_cast<Eigen::Index>(f->k);
  } else if (const auto* v = std::get_if<VarianceFraction>(&components)) {
    if (!(v->q > 0.0 && v->q < 1.0)) throw ConfigError("PCA variance fraction must lie in (0, 1)");
    double cumulative = 0.0;
    for (k = 0; k < max_k;) {
      cumulative += ratio(k++);
      if (cumulative >= v->q) break;
    }
  }

  model.components = svd.matrixV().leftCols(k).transpose();
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::Index arg = 0;
    model.components.row(i).cwiseAbs().maxCoeff(&arg);
    if (model.components(i, arg) < 0.0) model.components.row(i) *= -1.0;
  }
  model.explained_variance = variance.head(k);
  model.explained_variance_ratio = ratio.head(k);
  return model;
}

DenseMatrix transform_pca(const FeatureMatrix& m, const PcaModel& model) {
  if (m.cols() != model.input_dim()) {
    throw ShapeError("PCA transform: input has " + std::to_string(m.cols()) + " columns, model expects " +
                     std::to_string(model.input_dim()));
  }
  if (!m.is_sparse()) {
    DenseMatrix centered = m.dense();
    centered.rowwise() -= model.mean.transpose();
    return centered * model.components.transpose();
  }
  // (x - mean) W^T == x W^T - mean W^T; the product form keeps sparse input sparse.
  Eigen::MatrixXd projected = m.multiply_transposed(model.components);
  const Eigen::RowVectorXd offset = (model.components * model.mean).transpose();
  projected.rowwise() -= offset;
  return projected;
}

DenseMatrix inverse_transform_centered(const DenseMatrix& projected, const PcaModel& model) {
  if (static_cast<std::size_t>(projected.cols()) != model.n_components()) {
    throw ShapeError("PCA inverse transform: width mismatch");
  }
  return projected * model.components;
}

}  // namespace emo
