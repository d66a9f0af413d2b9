#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "emo/feature_matrix.hpp"
#include "emo/labels.hpp"

namespace emo {

class BinaryReader;
class BinaryWriter;

enum class ClassifierKind { dt, knn, rf, svm, voting, mlp };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

using ParamValue = std::variant<bool, std::int64_t, double, std::string, std::vector<std::int64_t>>;
using Hyperparameters = std::map<std::string, ParamValue>;

std::string to_string(const ParamValue& v);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::dt;
  Hyperparameters params;
  std::uint64_t seed = 0;
  std::vector<ClassifierSpec> members;  // voting only, in vote order

  // Parses every hyperparameter for its kind; throws ConfigError on unknown
  // keys, wrong types or out-of-range values.
  void validate() const;
  std::string describe() const;

  void save(BinaryWriter& w) const;
  static ClassifierSpec load(BinaryReader& r);

  friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;
};

// knn + dt + rf, each with default hyperparameters.
ClassifierSpec default_voting_spec(std::uint64_t seed = 0);

// Binary predictions plus, for score-producing kinds, scores in [0, 1] that
// reproduce `labels` under the rule score > 0.5.
struct PredictionMatrix {
  LabelMatrix labels;
  std::optional<Eigen::MatrixXd> scores;
};

// Learned state of one classifier kind.
class Model {
 public:
  virtual ~Model() = default;
  virtual PredictionMatrix predict(const FeatureMatrix& x) const = 0;
  virtual void save(BinaryWriter& w) const = 0;
};

// A trained multi-label predictor. Immutable; safe to share across threads.
class FittedClassifier {
 public:
  FittedClassifier(ClassifierSpec spec, std::size_t input_dim, std::size_t n_labels,
                   std::shared_ptr<const Model> model);

  // Throws ShapeError when x.cols() differs from the training width.
  PredictionMatrix predict(const FeatureMatrix& x) const;

  const ClassifierSpec& spec() const noexcept { return spec_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t n_labels() const noexcept { return n_labels_; }
  const Model& model() const noexcept { return *model_; }

  void save(BinaryWriter& w) const;
  static FittedClassifier load(BinaryReader& r);

 private:
  ClassifierSpec spec_;
  std::size_t input_dim_;
  std::size_t n_labels_;
  std::shared_ptr<const Model> model_;
};

// Deterministic for equal (spec, x, y). Throws ShapeError on an empty training
// set or row mismatch and ParseError on non-binary labels.
FittedClassifier fit(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelMatrix& y);

// Standalone classifier file: magic, format version, then the classifier.
void save_classifier(const FittedClassifier& model, const std::filesystem::path& path);
FittedClassifier load_classifier(const std::filesystem::path& path);

}  // namespace emo
