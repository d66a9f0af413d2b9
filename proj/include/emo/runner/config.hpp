#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emo/corpus.hpp"
#include "emo/language_fallback.hpp"
#include "emo/learn/classifier.hpp"
#include "emo/learn/grid_search.hpp"
#include "emo/reduce.hpp"
#include "emo/tokenize.hpp"

namespace emo {

enum class RepresentationKind { bow, tfidf, word_vectors, precomputed };

std::string_view to_string(RepresentationKind kind);  // "bow" | "tfidf" | "word-vectors" | "precomputed"
RepresentationKind parse_representation_kind(std::string_view name);

struct RepresentationSpec {
  std::string name;
  RepresentationKind kind = RepresentationKind::tfidf;
  TokenizerSpec tokenizer;
  bool row_normalize = true;  // tfidf
  // word-vectors: language -> .vec file; precomputed: language -> embedding file.
  std::map<std::string, std::filesystem::path> sources;
  std::size_t max_words = 0;  // word-vectors: 0 reads the whole file

  bool dense() const noexcept {
    return kind == RepresentationKind::word_vectors || kind == RepresentationKind::precomputed;
  }
};

struct ClassifierEntry {
  std::string name;
  ClassifierSpec spec;
  std::optional<HyperGrid> grid;  // mlp only; selected on dev F1-macro
};

struct ExperimentConfig {
  std::filesystem::path data_dir;
  std::vector<std::string> languages;
  std::vector<RepresentationSpec> representations;
  ReductionConfig reduction;
  std::vector<bool> pca{false};
  std::vector<ClassifierEntry> classifiers;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "emo-out";
  std::size_t workers = 1;
  bool save_models = true;
  FallbackPolicy fallback;  // `supported` is filled per dense representation

  // Checks axes and that every referenced file exists. Throws ConfigError.
  void validate() const;

  std::filesystem::path split_path(const std::string& language, SplitRole role) const;
};

// Relative paths are resolved against `base_dir`. Errors name the JSON path,
// e.g. "$.classifiers[2].params.k: must be an integer".
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace emo
