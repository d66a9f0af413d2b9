#include "emo/learn/knn.hpp"

#include <algorithm>
#include <utility>

#include "emo/binary_io.hpp"
#include "emo/error.hpp"
#include "emo/learn/params.hpp"

namespace emo {
namespace {

FeatureMatrix match_storage(const FeatureMatrix& query, bool sparse) {
  if (query.is_sparse() == sparse) return query;
  if (sparse) return FeatureMatrix(SparseMatrix(query.dense().sparseView()), query.provenance());
  return FeatureMatrix(query.to_dense(), query.provenance());
}

}  // namespace

KnnParams KnnParams::read(ParamReader& p) {
  return {static_cast<std::size_t>(p.integer("k", 5, 1))};
}

KNearestNeighbors KNearestNeighbors::fit(const FeatureMatrix& x, const LabelMatrix& y, const KnnParams& params) {
  KNearestNeighbors m;
  m.train_ = x;
  m.labels_ = y;
  m.params_ = params;
  return m;
}

std::size_t KNearestNeighbors::effective_k() const noexcept { return std::min(params_.k, train_.rows()); }

std::vector<std::size_t> KNearestNeighbors::neighbors(const FeatureMatrix& query, std::size_t row) const {
  const std::size_t n = train_.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = {query.squared_distance(row, train_, i), i};
  const std::size_t k = effective_k();
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

PredictionMatrix KNearestNeighbors::predict(const FeatureMatrix& x) const {
  const FeatureMatrix query = match_storage(x, train_.is_sparse());
  const std::size_t L = labels_.cols();
  const std::size_t k = effective_k();
  PredictionMatrix out{LabelMatrix(x.rows(), L),
                       Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(L))};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::vector<std::size_t> votes(L, 0);
    for (auto nb : neighbors(query, i))
      for (std::size_t j = 0; j < L; ++j) votes[j] += labels_(nb, j);
    for (std::size_t j = 0; j < L; ++j) {
      (*out.scores)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(votes[j]) / static_cast<double>(k);
      out.labels(i, j) = 2 * votes[j] > k;
    }
  }
  return out;
}

void KNearestNeighbors::save(BinaryWriter& w) const {
  w.u64(params_.k);
  save_matrix(w, train_);
  w.u64(labels_.rows());
  w.u64(labels_.cols());
  w.bytes(labels_.data());
}

KNearestNeighbors KNearestNeighbors::load(BinaryReader& r) {
  KNearestNeighbors m;
  m.params_.k = r.length();
  m.train_ = load_matrix(r);
  const std::size_t rows = r.length();
  const std::size_t cols = r.length();
  const auto bits = r.bytes();
  if (rows != m.train_.rows() || bits.size() != rows * cols || m.params_.k == 0) {
    throw FormatError("knn: inconsistent training table");
  }
  m.labels_ = LabelMatrix(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.labels_(i, j) = bits[i * cols + j];
  m.labels_.check_binary();
  return m;
}

}  // namespace emo
