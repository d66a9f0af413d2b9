#include "emo/learn/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "emo/binary_io.hpp"
#include "emo/error.hpp"
#include "emo/learn/params.hpp"

namespace emo {
namespace {

// Sum over labels of size * Gini = sum_j 2 c_j (n - c_j) / n.
double weighted_impurity(const std::size_t* positives, std::size_t n_labels, std::size_t n) {
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < n_labels; ++j) {
    const double c = static_cast<double>(positives[j]);
    acc += 2.0 * c * (static_cast<double>(n) - c);
  }
  return acc / static_cast<double>(n);
}

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = std::numeric_limits<double>::infinity();
  bool found = false;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, const LabelMatrix& y, const TreeParams& params, std::size_t max_features,
              Rng* rng)
      : x_(x), y_(y), params_(params), max_features_(max_features), rng_(rng), buckets_(x.cols()) {
    if (max_features_ > 0) {
      feature_pool_.resize(x.cols());
      std::iota(feature_pool_.begin(), feature_pool_.end(), std::size_t{0});
    }
  }

  void build(std::span<const std::size_t> samples, std::vector<DecisionTree::Node>& nodes,
             std::vector<double>& values) {
    const std::size_t L = y_.cols();
    struct Task {
      std::vector<std::size_t> samples;
      std::size_t depth;
      std::int32_t node;
    };
    nodes.assign(1, {});
    values.assign(L, 0.0);
    std::vector<Task> stack;
    stack.push_back({std::vector<std::size_t>(samples.begin(), samples.end()), 0, 0});
    std::vector<std::size_t> positives(L);

    while (!stack.empty()) {
      Task task = std::move(stack.back());
      stack.pop_back();
      const std::size_t n = task.samples.size();

      std::fill(positives.begin(), positives.end(), 0);
      for (auto s : task.samples)
        for (std::size_t j = 0; j < L; ++j) positives[j] += y_(s, j);
      bool pure = true;
      for (std::size_t j = 0; j < L; ++j) {
        values[static_cast<std::size_t>(task.node) * L + j] = static_cast<double>(positives[j]) / static_cast<double>(n);
        pure = pure && (positives[j] == 0 || positives[j] == n);
      }

      if (pure || n < params_.min_samples_split || n < 2 * params_.min_samples_leaf ||
          (params_.max_depth > 0 && task.depth >= params_.max_depth)) {
        continue;
      }
      std::vector<double> feature_values;
      const Split split = best_split(task.samples, positives, feature_values);
      if (!split.found) continue;

      std::vector<std::size_t> left, right;
      for (std::size_t p = 0; p < n; ++p) {
        (feature_values[p] <= split.threshold ? left : right).push_back(task.samples[p]);
      }
      const auto left_id = static_cast<std::int32_t>(nodes.size());
      const auto right_id = left_id + 1;
      auto& node = nodes[static_cast<std::size_t>(task.node)];
      node.feature = static_cast<std::int32_t>(split.feature);
      node.threshold = split.threshold;
      node.left = left_id;
      node.right = right_id;
      nodes.resize(nodes.size() + 2);
      values.resize(nodes.size() * L, 0.0);
      stack.push_back({std::move(right), task.depth + 1, right_id});
      stack.push_back({std::move(left), task.depth + 1, left_id});
    }
  }

 private:
  struct Entry {
    double value;
    std::size_t pos;  // position within the node's sample list
  };

  // Fills `feature_values` with the chosen feature's value per sample position.
  Split best_split(const std::vector<std::size_t>& samples, const std::vector<std::size_t>& positives,
                   std::vector<double>& feature_values) {
    const std::size_t n = samples.size();
    touched_.clear();
    for (std::size_t p = 0; p < n; ++p) {
      x_.for_each_nonzero(samples[p], [&](std::size_t col, double v) {
        if (buckets_[col].empty()) touched_.push_back(col);
        buckets_[col].push_back({v, p});
      });
    }

    Split best;
    if (max_features_ == 0) {
      std::sort(touched_.begin(), touched_.end());
      for (auto f : touched_) evaluate(f, samples, positives, best);
    } else {
      // Partial Fisher-Yates over the persistent pool draws without replacement.
      const std::size_t d = feature_pool_.size();
      std::size_t visited = 0;
      bool any_splittable = false;
      for (std::size_t i = 0; i < d && (visited < max_features_ || !any_splittable); ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, d - 1);
        std::swap(feature_pool_[i], feature_pool_[pick(*rng_)]);
        ++visited;
        any_splittable = evaluate(feature_pool_[i], samples, positives, best) || any_splittable;
      }
    }

    if (best.found) {
      feature_values.assign(n, 0.0);
      for (const auto& e : buckets_[best.feature]) feature_values[e.pos] = e.value;
    }
    for (auto col : touched_) buckets_[col].clear();
    return best;
  }

  // Returns false when the feature is constant over the node.
  bool evaluate(std::size_t f, const std::vector<std::size_t>& samples, const std::vector<std::size_t>& positives,
                Split& best) {
    auto& entries = buckets_[f];
    if (entries.empty()) return false;
    const std::size_t n = samples.size();
    const std::size_t L = y_.cols();
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.value < b.value || (a.value == b.value && a.pos < b.pos);
    });

    // Distinct-value groups in ascending order; the implicit zeros form one group.
    group_values_.clear();
    group_sizes_.clear();
    group_counts_.clear();
    const std::size_t zeros = n - entries.size();
    std::vector<std::size_t> zero_counts(positives);
    for (const auto& e : entries)
      for (std::size_t j = 0; j < L; ++j) zero_counts[j] -= y_(samples[e.pos], j);

    bool zero_emitted = zeros == 0;
    auto emit_zero = [&] {
      group_values_.push_back(0.0);
      group_sizes_.push_back(zeros);
      group_counts_.insert(group_counts_.end(), zero_counts.begin(), zero_counts.end());
      zero_emitted = true;
    };
    for (const auto& e : entries) {
      if (!zero_emitted && e.value > 0.0) emit_zero();
      if (group_values_.empty() || group_values_.back() != e.value) {
        group_values_.push_back(e.value);
        group_sizes_.push_back(0);
        group_counts_.resize(group_counts_.size() + L, 0);
      }
      ++group_sizes_.back();
      std::size_t* counts = group_counts_.data() + (group_values_.size() - 1) * L;
      for (std::size_t j = 0; j < L; ++j) counts[j] += y_(samples[e.pos], j);
    }
    if (!zero_emitted) emit_zero();
    if (group_values_.size() < 2) return false;

    std::vector<std::size_t> left(L, 0), right(L, 0);
    std::size_t n_left = 0;
    for (std::size_t g = 0; g + 1 < group_values_.size(); ++g) {
      n_left += group_sizes_[g];
      const std::size_t* counts = group_counts_.data() + g * L;
      for (std::size_t j = 0; j < L; ++j) left[j] += counts[j];
      const std::size_t n_right = n - n_left;
      if (n_left < params_.min_samples_leaf || n_right < params_.min_samples_leaf) continue;
      for (std::size_t j = 0; j < L; ++j) right[j] = positives[j] - left[j];
      const double score =
          weighted_impurity(left.data(), L, n_left) + weighted_impurity(right.data(), L, n_right);
      if (score < best.score) {
        const double a = group_values_[g], b = group_values_[g + 1];
        double threshold = a / 2.0 + b / 2.0;
        if (threshold == b || !std::isfinite(threshold)) threshold = a;
        best = {f, threshold, score, true};
      }
    }
    return true;
  }

  const FeatureMatrix& x_;
  const LabelMatrix& y_;
  const TreeParams& params_;
  std::size_t max_features_;
  Rng* rng_;
  std::vector<std::vector<Entry>> buckets_;
  std::vector<std::size_t> touched_;
  std::vector<std::size_t> feature_pool_;
  std::vector<double> group_values_;
  std::vector<std::size_t> group_sizes_;
  std::vector<std::size_t> group_counts_;
};

}  // namespace

TreeParams TreeParams::read(ParamReader& p) {
  TreeParams t;
  t.max_depth = static_cast<std::size_t>(p.integer("max_depth", 0, 0));
  t.min_samples_split = static_cast<std::size_t>(p.integer("min_samples_split", 2, 2));
  t.min_samples_leaf = static_cast<std::size_t>(p.integer("min_samples_leaf", 1, 1));
  return t;
}

DecisionTree DecisionTree::grow(const FeatureMatrix& x, const LabelMatrix& y, std::span<const std::size_t> samples,
                                const TreeParams& params, std::size_t max_features, Rng* rng) {
  if (samples.empty()) throw ShapeError("decision tree: no training samples");
  if (max_features > 0 && !rng) throw ConfigError("decision tree: feature sampling needs a generator");
  DecisionTree tree;
  tree.n_labels_ = y.cols();
  TreeBuilder(x, y, params, max_features >= x.cols() ? 0 : max_features, rng).build(samples, tree.nodes_, tree.values_);
  return tree;
}

std::span<const double> DecisionTree::leaf_values(const FeatureMatrix& x, std::size_t row) const {
  std::size_t node = 0;
  while (nodes_[node].feature >= 0) {
    const auto& nd = nodes_[node];
    node = static_cast<std::size_t>(x.value(row, static_cast<std::size_t>(nd.feature)) <= nd.threshold ? nd.left
                                                                                                          : nd.right);
  }
  return {values_.data() + node * n_labels_, n_labels_};
}

PredictionMatrix DecisionTree::predict(const FeatureMatrix& x) const {
  PredictionMatrix out{LabelMatrix(x.rows(), n_labels_),
                       Eigen::MatrixXd(static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(n_labels_))};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto v = leaf_values(x, i);
    for (std::size_t j = 0; j < n_labels_; ++j) {
      (*out.scores)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
      out.labels(i, j) = v[j] > 0.5;
    }
  }
  return out;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

void DecisionTree::save(BinaryWriter& w) const {
  w.u64(n_labels_);
  w.u64(nodes_.size());
  for (const auto& n : nodes_) {
    w.i64(n.feature);
    w.f64(n.threshold);
    w.i64(n.left);
    w.i64(n.right);
  }
  w.f64s(values_);
}

DecisionTree DecisionTree::load(BinaryReader& r) {
  DecisionTree t;
  t.n_labels_ = r.length();
  t.nodes_.resize(r.length());
  for (auto& n : t.nodes_) {
    n.feature = static_cast<std::int32_t>(r.i64());
    n.threshold = r.f64();
    n.left = static_cast<std::int32_t>(r.i64());
    n.right = static_cast<std::int32_t>(r.i64());
  }
  t.values_ = r.f64s();
  if (t.nodes_.empty() || t.values_.size() != t.nodes_.size() * t.n_labels_) {
    throw FormatError("decision tree: inconsistent node table");
  }
  const auto count = static_cast<std::int32_t>(t.nodes_.size());
  for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
    const auto& n = t.nodes_[i];
    if (n.feature >= 0 && (n.left <= static_cast<std::int32_t>(i) || n.right <= static_cast<std::int32_t>(i) ||
                           n.left >= count || n.right >= count)) {
      throw FormatError("decision tree: bad child index");
    }
  }
  return t;
}

ForestParams ForestParams::read(ParamReader& p) {
  ForestParams f;
  f.n_trees = static_cast<std::size_t>(p.integer("n_trees", 100, 1));
  f.bootstrap = p.flag("bootstrap", true);
  if (p.has("max_features")) {
    if (std::string mode = p.text("max_features", ""); mode == "all") {
      f.all_features = true;
    } else if (mode != "sqrt") {
      throw ConfigError("rf: max_features must be \"sqrt\" or \"all\"");
    }
  }
  f.tree = TreeParams::read(p);
  return f;
}

RandomForest RandomForest::fit(const FeatureMatrix& x, const LabelMatrix& y, const ForestParams& params,
                               std::uint64_t seed) {
  RandomForest forest;
  forest.n_labels_ = y.cols();
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t max_features =
      params.all_features ? 0
                          : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  Rng rng(seed);
  std::vector<std::size_t> samples(n);
  forest.trees_.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng tree_rng(rng());
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> draw(0, n - 1);
      for (auto& s : samples) s = draw(tree_rng);
      std::sort(samples.begin(), samples.end());
    } else {
      std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    forest.trees_.push_back(DecisionTree::grow(x, y, samples, params.tree, max_features, &tree_rng));
  }
  return forest;
}

PredictionMatrix RandomForest::predict(const FeatureMatrix& x) const {
  const auto rows = static_cast<Eigen::Index>(x.rows());
  const auto cols = static_cast<Eigen::Index>(n_labels_);
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (const auto& tree : trees_) {
      const auto v = tree.leaf_values(x, static_cast<std::size_t>(i));
      for (Eigen::Index j = 0; j < cols; ++j) scores(i, j) += v[static_cast<std::size_t>(j)];
    }
  }
  scores /= static_cast<double>(trees_.size());
  PredictionMatrix out{LabelMatrix(x.rows(), n_labels_), std::move(scores)};
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      out.labels(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = (*out.scores)(i, j) > 0.5;
  return out;
}

void RandomForest::save(BinaryWriter& w) const {
  w.u64(n_labels_);
  w.u64(trees_.size());
  for (const auto& t : trees_) t.save(w);
}

RandomForest RandomForest::load(BinaryReader& r) {
  RandomForest f;
  f.n_labels_ = r.length();
  f.trees_.resize(r.length());
  for (auto& t : f.trees_) t = DecisionTree::load(r);
  if (f.trees_.empty()) throw FormatError("random forest: no trees");
  return f;
}

}  // namespace emo
