#include "emo/learn/classifier.hpp"

#include <fmt/format.h>

#include <array>
#include <fstream>

#include "emo/binary_io.hpp"
#include "emo/error.hpp"
#include "emo/learn/decision_tree.hpp"
#include "emo/learn/knn.hpp"
#include "emo/learn/linear_svm.hpp"
#include "emo/learn/mlp.hpp"
#include "emo/learn/params.hpp"
#include "emo/learn/voting.hpp"

namespace emo {
namespace {

constexpr std::array<std::string_view, 6> kKindNames = {"dt", "knn", "rf", "svm", "voting", "mlp"};
constexpr std::string_view kClassifierMagic = "EMOMODEL";
constexpr std::uint32_t kClassifierVersion = 1;

enum class ParamTag : std::uint8_t { boolean, integer, real, text, integers };

}  // namespace

std::string_view to_string(ClassifierKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

ClassifierKind parse_classifier_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ClassifierKind>(i);
  }
  throw ConfigError(fmt::format("unknown classifier '{}' (expected dt, knn, rf, svm, voting or mlp)", name));
}

std::string to_string(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::vector<std::int64_t>>) {
          return fmt::format("[{}]", fmt::join(x, ","));
        } else {
          return fmt::format("{}", x);
        }
      },
      v);
}

void ClassifierSpec::validate() const {
  const std::string owner(to_string(kind));
  if (kind == ClassifierKind::voting) {
    if (!params.empty()) throw ConfigError("voting: takes no hyperparameters");
    if (members.empty()) throw ConfigError("voting: needs at least one member");
    for (const auto& m : members) m.validate();
    return;
  }
  if (!members.empty()) throw ConfigError(owner + ": only voting takes members");
  ParamReader reader(params, owner);
  switch (kind) {
    case ClassifierKind::dt: TreeParams::read(reader); break;
    case ClassifierKind::knn: KnnParams::read(reader); break;
    case ClassifierKind::rf: ForestParams::read(reader); break;
    case ClassifierKind::svm: SvmParams::read(reader); break;
    case ClassifierKind::mlp: MlpParams::read(reader); break;
    case ClassifierKind::voting: break;
  }
  reader.finish();
}

std::string ClassifierSpec::describe() const {
  if (kind == ClassifierKind::voting) {
    std::vector<std::string> parts;
    for (const auto& m : members) parts.push_back(m.describe());
    return fmt::format("voting[{}]", fmt::join(parts, ", "));
  }
  std::vector<std::string> parts;
  for (const auto& [k, v] : params) parts.push_back(k + "=" + to_string(v));
  return fmt::format("{}({})", to_string(kind), fmt::join(parts, ", "));
}

void ClassifierSpec::save(BinaryWriter& w) const {
  w.u8(static_cast<std::uint8_t>(kind));
  w.u64(seed);
  w.u64(params.size());
  for (const auto& [k, v] : params) {
    w.str(k);
    w.u8(static_cast<std::uint8_t>(v.index()));
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, bool>) {
            w.boolean(x);
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            w.i64(x);
          } else if constexpr (std::is_same_v<T, double>) {
            w.f64(x);
          } else if constexpr (std::is_same_v<T, std::string>) {
            w.str(x);
          } else {
            w.u64(x.size());
            for (auto i : x) w.i64(i);
          }
        },
        v);
  }
  w.u64(members.size());
  for (const auto& m : members) m.save(w);
}

ClassifierSpec ClassifierSpec::load(BinaryReader& r) {
  ClassifierSpec s;
  const auto kind = r.u8();
  if (kind >= kKindNames.size()) throw FormatError("classifier: unknown kind tag");
  s.kind = static_cast<ClassifierKind>(kind);
  s.seed = r.u64();
  const std::size_t n = r.length();
  for (std::size_t i = 0; i < n; ++i) {
    std::string key = r.str();
    switch (static_cast<ParamTag>(r.u8())) {
      case ParamTag::boolean: s.params[key] = r.boolean(); break;
      case ParamTag::integer: s.params[key] = r.i64(); break;
      case ParamTag::real: s.params[key] = r.f64(); break;
      case ParamTag::text: s.params[key] = r.str(); break;
      case ParamTag::integers: {
        std::vector<std::int64_t> list(r.length());
        for (auto& v : list) v = r.i64();
        s.params[key] = std::move(list);
        break;
      }
      default: throw FormatError("classifier: unknown hyperparameter tag");
    }
  }
  const std::size_t m = r.length();
  for (std::size_t i = 0; i < m; ++i) s.members.push_back(load(r));
  return s;
}

ClassifierSpec default_voting_spec(std::uint64_t seed) {
  ClassifierSpec v{ClassifierKind::voting, {}, seed, {}};
  for (auto kind : {ClassifierKind::knn, ClassifierKind::dt, ClassifierKind::rf}) v.members.push_back({kind, {}, 0, {}});
  return v;
}

FittedClassifier::FittedClassifier(ClassifierSpec spec, std::size_t input_dim, std::size_t n_labels,
                                   std::shared_ptr<const Model> model)
    : spec_(std::move(spec)), input_dim_(input_dim), n_labels_(n_labels), model_(std::move(model)) {}

PredictionMatrix FittedClassifier::predict(const FeatureMatrix& x) const {
  if (x.cols() != input_dim_) {
    throw ShapeError(fmt::format("{}: expected {} input columns, got {}", to_string(spec_.kind), input_dim_, x.cols()));
  }
  return model_->predict(x);
}

FittedClassifier fit(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelMatrix& y) {
  spec.validate();
  if (x.rows() == 0) throw ShapeError("fit: empty training set");
  if (x.rows() != y.rows()) {
    throw ShapeError(fmt::format("fit: {} feature rows but {} label rows", x.rows(), y.rows()));
  }
  if (y.cols() == 0) throw ShapeError("fit: no label columns");
  y.check_binary();
  if (!x.all_finite()) throw ShapeError("fit: features contain non-finite values");

  const std::string owner(to_string(spec.kind));
  ParamReader reader(spec.params, owner);
  std::shared_ptr<const Model> model;
  switch (spec.kind) {
    case ClassifierKind::dt: {
      std::vector<std::size_t> all(x.rows());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      model = std::make_shared<DecisionTree>(DecisionTree::grow(x, y, all, TreeParams::read(reader)));
      break;
    }
    case ClassifierKind::knn:
      model = std::make_shared<KNearestNeighbors>(KNearestNeighbors::fit(x, y, KnnParams::read(reader)));
      break;
    case ClassifierKind::rf:
      model = std::make_shared<RandomForest>(RandomForest::fit(x, y, ForestParams::read(reader), spec.seed));
      break;
    case ClassifierKind::svm:
      model = std::make_shared<LinearSvm>(LinearSvm::fit(x, y, SvmParams::read(reader), spec.seed));
      break;
    case ClassifierKind::mlp:
      model = std::make_shared<Mlp>(Mlp::fit(x, y, MlpParams::read(reader), spec.seed));
      break;
    case ClassifierKind::voting:
      model = std::make_shared<Voting>(Voting::fit(spec.members, x, y, spec.seed));
      break;
  }
  return {spec, x.cols(), y.cols(), std::move(model)};
}

void FittedClassifier::save(BinaryWriter& w) const {
  spec_.save(w);
  w.u64(input_dim_);
  w.u64(n_labels_);
  model_->save(w);
}

FittedClassifier FittedClassifier::load(BinaryReader& r) {
  ClassifierSpec spec = ClassifierSpec::load(r);
  const std::size_t input_dim = r.length();
  const std::size_t n_labels = r.length();
  std::shared_ptr<const Model> model;
  switch (spec.kind) {
    case ClassifierKind::dt: model = std::make_shared<DecisionTree>(DecisionTree::load(r)); break;
    case ClassifierKind::knn: model = std::make_shared<KNearestNeighbors>(KNearestNeighbors::load(r)); break;
    case ClassifierKind::rf: model = std::make_shared<RandomForest>(RandomForest::load(r)); break;
    case ClassifierKind::svm: model = std::make_shared<LinearSvm>(LinearSvm::load(r)); break;
    case ClassifierKind::mlp: model = std::make_shared<Mlp>(Mlp::load(r)); break;
    case ClassifierKind::voting: model = std::make_shared<Voting>(Voting::load(r)); break;
  }
  return {std::move(spec), input_dim, n_labels, std::move(model)};
}

void save_classifier(const FittedClassifier& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  BinaryWriter w(out);
  out.write(kClassifierMagic.data(), static_cast<std::streamsize>(kClassifierMagic.size()));
  w.u32(kClassifierVersion);
  model.save(w);
  if (!out) throw Error("write failed: " + path.string());
}

FittedClassifier load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::string magic(kClassifierMagic.size(), '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || magic != kClassifierMagic) throw FormatError(path.string() + ": not a classifier file");
  BinaryReader r(in);
  if (const auto version = r.u32(); version != kClassifierVersion) {
    throw FormatError(fmt::format("{}: classifier format version {} is not supported (expected {})", path.string(),
                                  version, kClassifierVersion));
  }
  return FittedClassifier::load(r);
}

}  // namespace emo
