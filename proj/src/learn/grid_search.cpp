#include "emo/learn/grid_search.hpp"

#include "emo/error.hpp"
#include "emo/evaluate.hpp"

namespace emo {

void HyperGrid::add(std::string key, std::vector<ParamValue> candidates) {
  if (candidates.empty()) throw ConfigError("grid: no candidates for '" + key + "'");
  for (const auto& [k, v] : axes_) {
    if (k == key) throw ConfigError("grid: duplicate key '" + key + "'");
  }
  axes_.emplace_back(std::move(key), std::move(candidates));
}

std::size_t HyperGrid::size() const noexcept {
  if (axes_.empty()) return 0;
  std::size_t n = 1;
  for (const auto& axis : axes_) n *= axis.second.size();
  return n;
}

std::vector<Hyperparameters> HyperGrid::enumerate() const {
  std::vector<Hyperparameters> out;
  if (axes_.empty()) return out;
  std::vector<std::size_t> idx(axes_.size(), 0);
  while (true) {
    Hyperparameters point;
    for (std::size_t a = 0; a < axes_.size(); ++a) point[axes_[a].first] = axes_[a].second[idx[a]];
    out.push_back(std::move(point));
    std::size_t a = axes_.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes_[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

HyperGrid default_mlp_grid() {
  HyperGrid g;
  g.add("hidden_layer_sizes", {std::vector<std::int64_t>{50}, std::vector<std::int64_t>{100}});
  g.add("learning_rate", {1e-2, 1e-3});
  g.add("batch_size", {std::int64_t{16}, std::int64_t{32}});
  return g;
}

GridSearchResult grid_search(const HyperGrid& grid, const ClassifierSpec& base, const GridScorer& score) {
  if (grid.empty()) throw ConfigError("grid search: empty grid");
  GridSearchResult result;
  bool have_best = false;
  for (auto& point : grid.enumerate()) {
    ClassifierSpec spec = base;
    for (auto& [k, v] : point) spec.params[k] = std::move(v);
    spec.validate();
    const double s = score(spec);
    result.evaluated.push_back({spec, s});
    if (!have_best || s > result.best_score) {
      result.best = spec;
      result.best_score = s;
      have_best = true;
    }
  }
  return result;
}

GridSearchResult grid_search_mlp(const HyperGrid& grid, const FeatureMatrix& x_train, const LabelMatrix& y_train,
                                 const FeatureMatrix& x_dev, const LabelMatrix& y_dev, std::uint64_t seed,
                                 const Hyperparameters& base) {
  if (y_dev.rows() == 0) throw NoLabelsError("grid search: dev split has no labeled rows");
  ClassifierSpec spec{ClassifierKind::mlp, base, seed, {}};
  std::optional<FittedClassifier> best_model;
  double best = 0.0;
  auto result = grid_search(grid, spec, [&](const ClassifierSpec& s) {
    FittedClassifier model = fit(s, x_train, y_train);
    const double f1 = f1_macro(y_dev, model.predict(x_dev).labels);
    if (!best_model || f1 > best) {
      best_model.emplace(std::move(model));
      best = f1;
    }
    return f1;
  });
  result.best_model = std::move(best_model);
  return result;
}

}  // namespace emo
