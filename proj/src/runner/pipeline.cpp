#include "emo/runner/pipeline.hpp"

#include <fmt/format.h>

#include <fstream>

#include "emo/binary_io.hpp"
#include "emo/error.hpp"

namespace emo {
namespace {

constexpr std::string_view kPipelineMagic = "EMOPIPE1";
constexpr std::uint32_t kPipelineVersion = 1;

}  // namespace

FittedRepresentation FittedRepresentation::fit(const RepresentationSpec& spec, const DatasetSplit& train,
                                               std::string resolved_language, std::filesystem::path source,
                                               std::shared_ptr<const EmbeddingTable> vectors) {
  FittedRepresentation r;
  r.name_ = spec.name;
  r.kind_ = spec.kind;
  r.resolved_language_ = std::move(resolved_language);
  r.source_ = std::move(source);
  r.max_words_ = spec.max_words;
  if (spec.kind != RepresentationKind::precomputed) r.tokenizer_ = std::make_shared<const Tokenizer>(spec.tokenizer);

  switch (spec.kind) {
    case RepresentationKind::bow:
      r.bow_ = fit_bow(r.tokenize_split(train));
      r.dim_ = r.bow_->size();
      break;
    case RepresentationKind::tfidf:
      r.tfidf_ = fit_tfidf(r.tokenize_split(train), spec.row_normalize);
      r.dim_ = r.tfidf_->vocabulary.size();
      break;
    case RepresentationKind::word_vectors:
      r.vectors_ = vectors ? std::move(vectors)
                           : std::make_shared<const EmbeddingTable>(
                                 load_word_vectors(r.source_, r.resolved_language_, r.max_words_));
      r.dim_ = r.vectors_->dimension();
      break;
    case RepresentationKind::precomputed: {
      const auto ids = train.ids();
      r.dim_ = static_cast<std::size_t>(load_precomputed_embeddings(r.source_, std::span(ids.data(), 1)).cols());
      break;
    }
  }
  return r;
}

std::vector<TokenSequence> FittedRepresentation::tokenize_split(const DatasetSplit& split) const {
  std::vector<TokenSequence> out;
  out.reserve(split.size());
  for (const auto& d : split.documents) out.push_back(tokenizer_->tokenize(d.text, d.id));
  return out;
}

FeatureMatrix FittedRepresentation::transform(const DatasetSplit& split, OovReport* oov) const {
  switch (kind_) {
    case RepresentationKind::bow:
      return FeatureMatrix(transform_bow(tokenize_split(split), *bow_), name_);
    case RepresentationKind::tfidf:
      return FeatureMatrix(transform_tfidf(tokenize_split(split), *tfidf_), name_);
    case RepresentationKind::word_vectors: {
      auto pooled = embed_documents(tokenize_split(split), *vectors_);
      if (oov) *oov = pooled.oov;
      return FeatureMatrix(std::move(pooled.matrix), name_);
    }
    case RepresentationKind::precomputed: {
      const auto ids = split.ids();
      DenseMatrix m = load_precomputed_embeddings(source_, ids);
      if (static_cast<std::size_t>(m.cols()) != dim_) {
        throw ShapeError(fmt::format("{}: embeddings have {} dimensions, model expects {}", source_.string(), m.cols(),
                                     dim_));
      }
      return FeatureMatrix(std::move(m), name_);
    }
  }
  throw Error("unreachable representation kind");
}

void FittedRepresentation::save(BinaryWriter& w) const {
  w.str(name_);
  w.u8(static_cast<std::uint8_t>(kind_));
  w.str(resolved_language_);
  w.str(source_.string());
  w.u64(max_words_);
  w.u64(dim_);
  w.boolean(tokenizer_ != nullptr);
  if (tokenizer_) {
    const auto& spec = tokenizer_->spec();
    w.u8(static_cast<std::uint8_t>(spec.kind));
    w.boolean(spec.lowercase);
    w.strings(tokenizer_->vocabulary());
  }
  if (kind_ == RepresentationKind::bow) bow_->save(w);
  if (kind_ == RepresentationKind::tfidf) tfidf_->save(w);
}

FittedRepresentation FittedRepresentation::load(BinaryReader& r) {
  FittedRepresentation f;
  f.name_ = r.str();
  const auto kind = r.u8();
  if (kind > static_cast<std::uint8_t>(RepresentationKind::precomputed)) throw FormatError("pipeline: bad representation tag");
  f.kind_ = static_cast<RepresentationKind>(kind);
  f.resolved_language_ = r.str();
  f.source_ = r.str();
  f.max_words_ = r.length();
  f.dim_ = r.length();
  if (r.boolean()) {
    TokenizerSpec spec;
    const auto tk = r.u8();
    if (tk > static_cast<std::uint8_t>(TokenizerKind::external_vocab)) throw FormatError("pipeline: bad tokenizer tag");
    spec.kind = static_cast<TokenizerKind>(tk);
    spec.lowercase = r.boolean();
    auto vocab = r.strings();
    f.tokenizer_ = spec.kind == TokenizerKind::external_vocab
                       ? std::make_shared<const Tokenizer>(spec, std::move(vocab))
                       : std::make_shared<const Tokenizer>(spec);
  } else if (f.kind_ != RepresentationKind::precomputed) {
    throw FormatError("pipeline: representation lacks a tokenizer");
  }
  if (f.kind_ == RepresentationKind::bow) f.bow_ = Vocabulary::load(r);
  if (f.kind_ == RepresentationKind::tfidf) f.tfidf_ = TfidfModel::load(r);
  if (f.kind_ == RepresentationKind::word_vectors) {
    f.vectors_ = std::make_shared<const EmbeddingTable>(load_word_vectors(f.source_, f.resolved_language_, f.max_words_));
    if (f.vectors_->dimension() != f.dim_) {
      throw ShapeError(fmt::format("{}: vectors have {} dimensions, model expects {}", f.source_.string(),
                                   f.vectors_->dimension(), f.dim_));
    }
  }
  return f;
}

FittedReduction FittedReduction::fit(const ReductionConfig& config, const FeatureMatrix& train) {
  config.validate();
  FittedReduction r;
  r.normalize = config.normalize;
  r.pca = fit_pca(r.normalize ? normalize_rows(train) : train, config.components);
  return r;
}

FeatureMatrix FittedReduction::apply(const FeatureMatrix& m) const {
  FeatureMatrix x = normalize ? normalize_rows(m) : m;
  if (!pca) return x;
  std::string provenance = m.provenance() + ">pca";
  return FeatureMatrix(transform_pca(x, *pca), std::move(provenance));
}

void FittedReduction::save(BinaryWriter& w) const {
  w.boolean(normalize);
  w.boolean(pca.has_value());
  if (pca) pca->save(w);
}

FittedReduction FittedReduction::load(BinaryReader& r) {
  FittedReduction f;
  f.normalize = r.boolean();
  if (r.boolean()) f.pca = PcaModel::load(r);
  return f;
}

FeatureMatrix PipelineModel::features(const DatasetSplit& split) const {
  FeatureMatrix x = representation_.transform(split);
  return reduction_ ? reduction_->apply(x) : x;
}

PredictionMatrix PipelineModel::predict(const DatasetSplit& split) const { return classifier_.predict(features(split)); }

void PipelineModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kPipelineMagic.data(), static_cast<std::streamsize>(kPipelineMagic.size()));
  BinaryWriter w(out);
  w.u32(kPipelineVersion);
  representation_.save(w);
  w.boolean(reduction_.has_value());
  if (reduction_) reduction_->save(w);
  classifier_.save(w);
  if (!out) throw Error("write failed: " + path.string());
}

PipelineModel PipelineModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::string magic(kPipelineMagic.size(), '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || magic != kPipelineMagic) throw FormatError(path.string() + ": not a pipeline model file");
  BinaryReader r(in);
  if (const auto v = r.u32(); v != kPipelineVersion) {
    throw FormatError(fmt::format("{}: pipeline format version {} is not supported (expected {})", path.string(), v,
                                  kPipelineVersion));
  }
  FittedRepresentation rep = FittedRepresentation::load(r);
  std::optional<FittedReduction> red;
  if (r.boolean()) red = FittedReduction::load(r);
  FittedClassifier clf = FittedClassifier::load(r);
  if (clf.input_dim() != (red ? red->output_dim(rep.dimension()) : rep.dimension())) {
    throw FormatError(path.string() + ": classifier width does not match the feature stages");
  }
  return PipelineModel(std::move(rep), std::move(red), std::move(clf));
}

}  // namespace emo
