#pragma once

#include <cstddef>
#include <vector>

#include "emo/learn/classifier.hpp"

namespace emo {

class ParamReader;

struct KnnParams {
  std::size_t k = 5;

  static KnnParams read(ParamReader& p);
};

// Exact Euclidean neighbours; a label is predicted when more than half of the
// k neighbours carry it. Equal distances are ordered by training row index.
class KNearestNeighbors final : public Model {
 public:
  static KNearestNeighbors fit(const FeatureMatrix& x, const LabelMatrix& y, const KnnParams& params);

  PredictionMatrix predict(const FeatureMatrix& x) const override;
  void save(BinaryWriter& w) const override;
  static KNearestNeighbors load(BinaryReader& r);

  // Training rows nearest to row `row` of `query`, nearest first.
  std::vector<std::size_t> neighbors(const FeatureMatrix& query, std::size_t row) const;
  std::size_t effective_k() const noexcept;

 private:
  FeatureMatrix train_;
  LabelMatrix labels_;
  KnnParams params_;
};

}  // namespace emo
