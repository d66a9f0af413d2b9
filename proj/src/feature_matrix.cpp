#include "emo/feature_matrix.hpp"

#include <cmath>

#include "emo/binary_io.hpp"
#include "emo/error.hpp"

namespace emo {

SparseMatrix make_sparse(std::size_t cols, const std::vector<std::vector<SparseEntry>>& rows) {
  SparseMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  Eigen::VectorXi nnz(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) nnz(static_cast<Eigen::Index>(r)) = static_cast<int>(rows[r].size());
  m.reserve(nnz);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& e : rows[r]) {
      if (e.column < 0 || static_cast<std::size_t>(e.column) >= cols) {
        throw ShapeError("sparse entry column " + std::to_string(e.column) + " out of range");
      }
      if (e.value != 0.0) m.insert(static_cast<Eigen::Index>(r), e.column) = e.value;
    }
  }
  m.makeCompressed();
  return m;
}

std::size_t FeatureMatrix::rows() const {
  return std::visit([](const auto& m) { return static_cast<std::size_t>(m.rows()); }, data_);
}

std::size_t FeatureMatrix::cols() const {
  return std::visit([](const auto& m) { return static_cast<std::size_t>(m.cols()); }, data_);
}

DenseMatrix FeatureMatrix::to_dense() const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) return DenseMatrix(*s);
  return std::get<DenseMatrix>(data_);
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) {
    SparseMatrix out(static_cast<Eigen::Index>(indices.size()), s->cols());
    Eigen::VectorXi nnz(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(indices[i]);
      nnz(static_cast<Eigen::Index>(i)) = s->outerIndexPtr()[r + 1] - s->outerIndexPtr()[r];
    }
    out.reserve(nnz);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      for (SparseMatrix::InnerIterator it(*s, static_cast<Eigen::Index>(indices[i])); it; ++it) {
        out.insert(static_cast<Eigen::Index>(i), it.col()) = it.value();
      }
    }
    out.makeCompressed();
    return FeatureMatrix(std::move(out), provenance_);
  }
  const auto& d = std::get<DenseMatrix>(data_);
  DenseMatrix out(static_cast<Eigen::Index>(indices.size()), d.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = d.row(static_cast<Eigen::Index>(indices[i]));
  }
  return FeatureMatrix(std::move(out), provenance_);
}

Eigen::MatrixXd FeatureMatrix::multiply_transposed(const Eigen::Ref<const Eigen::MatrixXd>& w) const {
  if (static_cast<std::size_t>(w.cols()) != cols()) throw ShapeError("multiply_transposed: width mismatch");
  return std::visit([&](const auto& m) -> Eigen::MatrixXd { return m * w.transpose(); }, data_);
}

Eigen::MatrixXd FeatureMatrix::transpose_multiply(const Eigen::Ref<const Eigen::MatrixXd>& d) const {
  if (static_cast<std::size_t>(d.rows()) != rows()) throw ShapeError("transpose_multiply: height mismatch");
  return std::visit([&](const auto& m) -> Eigen::MatrixXd { return m.transpose() * d; }, data_);
}

double FeatureMatrix::value(std::size_t row, std::size_t col) const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) {
    return s->coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }
  return std::get<DenseMatrix>(data_)(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

double FeatureMatrix::squared_norm(std::size_t row) const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) return s->row(static_cast<Eigen::Index>(row)).squaredNorm();
  return std::get<DenseMatrix>(data_).row(static_cast<Eigen::Index>(row)).squaredNorm();
}

double FeatureMatrix::squared_distance(std::size_t row, const FeatureMatrix& other, std::size_t other_row) const {
  if (is_sparse() != other.is_sparse()) throw ShapeError("squared_distance: mixed sparse and dense operands");
  if (cols() != other.cols()) throw ShapeError("squared_distance: width mismatch");
  if (!is_sparse()) {
    const auto a = dense().row(static_cast<Eigen::Index>(row));
    const auto b = other.dense().row(static_cast<Eigen::Index>(other_row));
    double acc = 0.0;
    for (Eigen::Index c = 0; c < a.size(); ++c) {
      const double diff = a(c) - b(c);
      acc += diff * diff;
    }
    return acc;
  }
  SparseMatrix::InnerIterator a(sparse(), static_cast<Eigen::Index>(row));
  SparseMatrix::InnerIterator b(other.sparse(), static_cast<Eigen::Index>(other_row));
  double acc = 0.0;
  while (a || b) {
    if (a && (!b || a.col() < b.col())) {
      acc += a.value() * a.value();
      ++a;
    } else if (b && (!a || b.col() < a.col())) {
      acc += b.value() * b.value();
      ++b;
    } else {
      const double diff = a.value() - b.value();
      acc += diff * diff;
      ++a;
      ++b;
    }
  }
  return acc;
}

bool FeatureMatrix::all_finite() const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) {
    for (Eigen::Index i = 0; i < s->nonZeros(); ++i) {
      if (!std::isfinite(s->valuePtr()[i])) return false;
    }
    return true;
  }
  return std::get<DenseMatrix>(data_).allFinite();
}

void save_matrix(BinaryWriter& w, const FeatureMatrix& m) {
  w.str(m.provenance());
  w.boolean(m.is_sparse());
  if (!m.is_sparse()) {
    w.matrix(m.dense());
    return;
  }
  const auto& s = m.sparse();
  w.u64(static_cast<std::uint64_t>(s.rows()));
  w.u64(static_cast<std::uint64_t>(s.cols()));
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    w.u64(static_cast<std::uint64_t>(s.outerIndexPtr()[r + 1] - s.outerIndexPtr()[r]));
    for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
      w.u64(static_cast<std::uint64_t>(it.col()));
      w.f64(it.value());
    }
  }
}

FeatureMatrix load_matrix(BinaryReader& r) {
  std::string provenance = r.str();
  if (!r.boolean()) return FeatureMatrix(r.matrix<DenseMatrix>(), std::move(provenance));
  const std::size_t rows = r.length();
  const std::size_t cols = r.length();
  std::vector<std::vector<SparseEntry>> entries(rows);
  for (auto& row : entries) {
    row.resize(r.length());
    for (auto& e : row) {
      const auto col = r.u64();
      if (col >= cols) throw FormatError("sparse matrix: column out of range");
      e = {static_cast<int>(col), r.f64()};
    }
  }
  return FeatureMatrix(make_sparse(cols, entries), std::move(provenance));
}

}  // namespace emo
