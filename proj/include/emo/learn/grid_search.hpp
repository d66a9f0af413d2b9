#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emo/learn/classifier.hpp"

namespace emo {

// Candidate values per hyperparameter. Enumeration is lexicographic in
// declaration order: the first key added varies slowest.
class HyperGrid {
 public:
  void add(std::string key, std::vector<ParamValue> candidates);

  bool empty() const noexcept { return axes_.empty(); }
  std::size_t size() const noexcept;
  std::vector<Hyperparameters> enumerate() const;
  const std::vector<std::pair<std::string, std::vector<ParamValue>>>& axes() const noexcept { return axes_; }

 private:
  std::vector<std::pair<std::string, std::vector<ParamValue>>> axes_;
};

// hidden_layer_sizes {50, 100} x learning_rate {1e-2, 1e-3} x batch_size {16, 32}.
HyperGrid default_mlp_grid();

struct GridPoint {
  ClassifierSpec spec;
  double score = 0.0;
};

struct GridSearchResult {
  ClassifierSpec best;
  double best_score = 0.0;
  std::vector<GridPoint> evaluated;  // enumeration order
  std::optional<FittedClassifier> best_model;
};

using GridScorer = std::function<double(const ClassifierSpec&)>;

// Scores every point (base params overlaid with the point) and returns the
// argmax; ties keep the earliest point. Throws ConfigError on an empty grid.
GridSearchResult grid_search(const HyperGrid& grid, const ClassifierSpec& base, const GridScorer& score);

// Trains an mlp per point on `train`, scores F1-macro on `dev`, and keeps the
// winning model. Throws NoLabelsError when the dev labels are empty.
GridSearchResult grid_search_mlp(const HyperGrid& grid, const FeatureMatrix& x_train, const LabelMatrix& y_train,
                                 const FeatureMatrix& x_dev, const LabelMatrix& y_dev, std::uint64_t seed,
                                 const Hyperparameters& base = {});

}  // namespace emo
