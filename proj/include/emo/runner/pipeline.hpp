#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emo/corpus.hpp"
#include "emo/dense_features.hpp"
#include "emo/learn/classifier.hpp"
#include "emo/reduce.hpp"
#include "emo/runner/config.hpp"
#include "emo/sparse_features.hpp"
#include "emo/tokenize.hpp"

namespace emo {

// Document -> feature-row mapping fitted on a training split.
class FittedRepresentation {
 public:
  // `source` is the vector or embedding file for dense kinds (already resolved
  // to a supported language); `vectors` may pass a preloaded table for it.
  static FittedRepresentation fit(const RepresentationSpec& spec, const DatasetSplit& train,
                                  std::string resolved_language = {}, std::filesystem::path source = {},
                                  std::shared_ptr<const EmbeddingTable> vectors = nullptr);

  // Throws AlignmentError when a precomputed file lacks ids of `split`.
  FeatureMatrix transform(const DatasetSplit& split, OovReport* oov = nullptr) const;

  const std::string& name() const noexcept { return name_; }
  RepresentationKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dim_; }
  const std::string& resolved_language() const noexcept { return resolved_language_; }
  const std::filesystem::path& source() const noexcept { return source_; }
  const std::optional<Vocabulary>& bow() const noexcept { return bow_; }
  const std::optional<TfidfModel>& tfidf() const noexcept { return tfidf_; }

  // Precomputed embeddings for a new split come from a different file.
  void set_source(std::filesystem::path source) { source_ = std::move(source); }

  void save(BinaryWriter& w) const;
  // Word vectors are reloaded from the recorded path.
  static FittedRepresentation load(BinaryReader& r);

 private:
  std::vector<TokenSequence> tokenize_split(const DatasetSplit& split) const;

  std::string name_;
  RepresentationKind kind_ = RepresentationKind::tfidf;
  std::shared_ptr<const Tokenizer> tokenizer_;
  std::optional<Vocabulary> bow_;
  std::optional<TfidfModel> tfidf_;
  std::shared_ptr<const EmbeddingTable> vectors_;
  std::size_t max_words_ = 0;
  std::filesystem::path source_;
  std::string resolved_language_;
  std::size_t dim_ = 0;
};

// Optional row normalization followed by PCA, as fitted on training features.
struct FittedReduction {
  bool normalize = false;
  std::optional<PcaModel> pca;

  static FittedReduction fit(const ReductionConfig& config, const FeatureMatrix& train);
  FeatureMatrix apply(const FeatureMatrix& m) const;
  std::size_t output_dim(std::size_t input_dim) const noexcept {
    return pca ? pca->n_components() : input_dim;
  }

  void save(BinaryWriter& w) const;
  static FittedReduction load(BinaryReader& r);
};

// Everything needed to label raw text: representation, reduction, classifier.
class PipelineModel {
 public:
  PipelineModel(FittedRepresentation representation, std::optional<FittedReduction> reduction,
                FittedClassifier classifier)
      : representation_(std::move(representation)),
        reduction_(std::move(reduction)),
        classifier_(std::move(classifier)) {}

  FeatureMatrix features(const DatasetSplit& split) const;
  PredictionMatrix predict(const DatasetSplit& split) const;

  FittedRepresentation& representation() noexcept { return representation_; }
  const FittedRepresentation& representation() const noexcept { return representation_; }
  const std::optional<FittedReduction>& reduction() const noexcept { return reduction_; }
  const FittedClassifier& classifier() const noexcept { return classifier_; }

  // Container: magic "EMOPIPE1", format version, then the three stages.
  void save(const std::filesystem::path& path) const;
  static PipelineModel load(const std::filesystem::path& path);

 private:
  FittedRepresentation representation_;
  std::optional<FittedReduction> reduction_;
  FittedClassifier classifier_;
};

}  // namespace emo
