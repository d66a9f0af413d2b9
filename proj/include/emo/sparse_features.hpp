#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emo/feature_matrix.hpp"
#include "emo/tokenize.hpp"

namespace emo {

class BinaryReader;
class BinaryWriter;

// Token -> column map with per-token document frequencies. Columns follow
// sorted token order, so fitting is deterministic.
class Vocabulary {
 public:
  Vocabulary() = default;
  // `tokens` must be sorted and unique; `document_frequency` aligned with it.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> document_frequency, std::size_t corpus_size);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t corpus_size() const noexcept { return corpus_size_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t document_frequency(std::size_t column) const { return df_.at(column); }
  std::optional<std::size_t> index_of(std::string_view token) const;

  void save(BinaryWriter& w) const;
  static Vocabulary load(BinaryReader& r);

  // Two tab-separated columns: token, DF.
  void write_text(std::ostream& out) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.df_ == b.df_ && a.corpus_size_ == b.corpus_size_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::size_t> df_;
  std::size_t corpus_size_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

// Throws EmptyVocabularyError when no document has a token.
Vocabulary fit_bow(std::span<const TokenSequence> corpus);

// Raw counts; out-of-vocabulary tokens are skipped.
SparseMatrix transform_bow(std::span<const TokenSequence> docs, const Vocabulary& vocab);

// Smoothed inverse document frequency with natural log: ln((1+N)/(1+DF)) + 1.
double smoothed_idf(std::size_t corpus_size, std::size_t document_frequency);

struct TfidfModel {
  Vocabulary vocabulary;
  std::vector<double> idf;  // aligned with vocabulary columns
  bool row_normalize = true;

  void save(BinaryWriter& w) const;
  static TfidfModel load(BinaryReader& r);

  friend bool operator==(const TfidfModel&, const TfidfModel&) = default;
};

TfidfModel fit_tfidf(std::span<const TokenSequence> corpus, bool row_normalize = true);

// Entry = raw count * idf; nonzero rows scaled to unit L2 norm when the model
// says so. All-OOV rows stay empty.
SparseMatrix transform_tfidf(std::span<const TokenSequence> docs, const TfidfModel& model);

}  // namespace emo
