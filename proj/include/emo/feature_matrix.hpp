#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace emo {

class BinaryReader;
class BinaryWriter;

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
// Compressed rows, columns sorted within a row, no duplicates.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct SparseEntry {
  int column;
  double value;
};

// Builds a compressed sparse matrix from per-row entry lists. Zero-valued
// entries are dropped; columns must be unique within a row.
SparseMatrix make_sparse(std::size_t cols, const std::vector<std::vector<SparseEntry>>& rows);

// Row-per-document feature matrix, sparse or dense. `provenance` names the
// representation chain that produced the columns (e.g. "tfidf>pca").
class FeatureMatrix {
 public:
  FeatureMatrix() : data_(DenseMatrix()) {}
  explicit FeatureMatrix(DenseMatrix m, std::string provenance = {})
      : data_(std::move(m)), provenance_(std::move(provenance)) {}
  explicit FeatureMatrix(SparseMatrix m, std::string provenance = {})
      : data_(std::move(m)), provenance_(std::move(provenance)) {}

  std::size_t rows() const;
  std::size_t cols() const;
  bool is_sparse() const noexcept { return std::holds_alternative<SparseMatrix>(data_); }

  const DenseMatrix& dense() const { return std::get<DenseMatrix>(data_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(data_); }

  const std::string& provenance() const noexcept { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  DenseMatrix to_dense() const;
  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

  // this * w^T, with w laid out (outputs x cols()).
  Eigen::MatrixXd multiply_transposed(const Eigen::Ref<const Eigen::MatrixXd>& w) const;
  // this^T * d, with d laid out (rows() x k).
  Eigen::MatrixXd transpose_multiply(const Eigen::Ref<const Eigen::MatrixXd>& d) const;

  double value(std::size_t row, std::size_t col) const;
  double squared_norm(std::size_t row) const;

  // Exact sum of squared coordinate differences. Both operands must share storage kind.
  double squared_distance(std::size_t row, const FeatureMatrix& other, std::size_t other_row) const;

  bool all_finite() const;

  // Calls f(column, value) for every nonzero entry of `row` in column order.
  template <typename F>
  void for_each_nonzero(std::size_t row, F&& f) const {
    if (const auto* s = std::get_if<SparseMatrix>(&data_)) {
      for (SparseMatrix::InnerIterator it(*s, static_cast<Eigen::Index>(row)); it; ++it) {
        if (it.value() != 0.0) f(static_cast<std::size_t>(it.col()), it.value());
      }
    } else {
      const auto& d = std::get<DenseMatrix>(data_);
      const auto r = static_cast<Eigen::Index>(row);
      for (Eigen::Index c = 0; c < d.cols(); ++c) {
        const double v = d(r, c);
        if (v != 0.0) f(static_cast<std::size_t>(c), v);
      }
    }
  }

 private:
  std::variant<DenseMatrix, SparseMatrix> data_;
  std::string provenance_;
};

// Storage kind, shape and values; provenance included.
void save_matrix(BinaryWriter& w, const FeatureMatrix& m);
FeatureMatrix load_matrix(BinaryReader& r);

}  // namespace emo
