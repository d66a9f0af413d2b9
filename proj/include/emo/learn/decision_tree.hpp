#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "emo/learn/classifier.hpp"
#include "emo/rng.hpp"

namespace emo {

class ParamReader;

struct TreeParams {
  std::size_t max_depth = 0;  // 0 = grow until pure
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;

  static TreeParams read(ParamReader& p);
};

// CART over all outputs at once: the split criterion is the sum of the
// per-label Gini impurities, and each leaf stores per-label positive fractions.
class DecisionTree final : public Model {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  // `samples` lists training rows and may repeat them (bootstrap).
  // `max_features` = 0 scans every feature in column order; otherwise features
  // are drawn from `rng` without replacement until `max_features` have been
  // visited and at least one was splittable.
  static DecisionTree grow(const FeatureMatrix& x, const LabelMatrix& y, std::span<const std::size_t> samples,
                           const TreeParams& params, std::size_t max_features = 0, Rng* rng = nullptr);

  PredictionMatrix predict(const FeatureMatrix& x) const override;
  void save(BinaryWriter& w) const override;
  static DecisionTree load(BinaryReader& r);

  // Positive fraction per label at the leaf reached by row `row` of `x`.
  std::span<const double> leaf_values(const FeatureMatrix& x, std::size_t row) const;

  std::size_t depth() const;
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const;
  std::size_t n_labels() const noexcept { return n_labels_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<Node> nodes_;
  std::vector<double> values_;  // n_labels_ per node
  std::size_t n_labels_ = 0;
};

struct ForestParams {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  std::size_t max_features = 0;  // 0 = floor(sqrt(d)), at least 1
  bool all_features = false;     // max_features = "all"
  TreeParams tree;

  static ForestParams read(ParamReader& p);
};

// Bagged trees; per label, the averaged leaf fractions are thresholded at 0.5.
class RandomForest final : public Model {
 public:
  static RandomForest fit(const FeatureMatrix& x, const LabelMatrix& y, const ForestParams& params,
                          std::uint64_t seed);

  PredictionMatrix predict(const FeatureMatrix& x) const override;
  void save(BinaryWriter& w) const override;
  static RandomForest load(BinaryReader& r);

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
  std::size_t n_labels_ = 0;
};

}  // namespace emo
