#include "emo/sparse_features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "emo/binary_io.hpp"
#include "emo/error.hpp"

namespace emo {
namespace {

// Per-document (column, count) pairs sorted by column.
std::vector<std::vector<SparseEntry>> count_rows(std::span<const TokenSequence> docs, const Vocabulary& vocab) {
  std::vector<std::vector<SparseEntry>> rows(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::map<std::size_t, double> counts;
    for (const auto& tok : docs[d].tokens) {
      if (auto col = vocab.index_of(tok)) counts[*col] += 1.0;
    }
    rows[d].reserve(counts.size());
    for (const auto& [col, n] : counts) rows[d].push_back({static_cast<int>(col), n});
  }
  return rows;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> document_frequency,
                       std::size_t corpus_size)
    : tokens_(std::move(tokens)), df_(std::move(document_frequency)), corpus_size_(corpus_size) {
  if (tokens_.size() != df_.size()) throw ShapeError("vocabulary: tokens and frequencies differ in length");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i > 0 && !(tokens_[i - 1] < tokens_[i])) throw FormatError("vocabulary tokens must be sorted and unique");
    if (df_[i] < 1 || df_[i] > corpus_size_) throw FormatError("vocabulary: DF out of range for '" + tokens_[i] + "'");
    index_.emplace(tokens_[i], i);
  }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::save(BinaryWriter& w) const {
  w.u64(corpus_size_);
  w.strings(tokens_);
  w.u64(df_.size());
  for (auto df : df_) w.u64(df);
}

Vocabulary Vocabulary::load(BinaryReader& r) {
  const auto n = r.u64();
  auto tokens = r.strings();
  std::vector<std::size_t> df(r.length());
  for (auto& x : df) x = r.u64();
  return Vocabulary(std::move(tokens), std::move(df), n);
}

void Vocabulary::write_text(std::ostream& out) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << df_[i] << '\n';
}

Vocabulary fit_bow(std::span<const TokenSequence> corpus) {
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    std::set<std::string_view> present(doc.tokens.begin(), doc.tokens.end());
    for (auto tok : present) ++df[std::string(tok)];
  }
  if (df.empty()) throw EmptyVocabularyError("no tokens in the fitting corpus");
  std::vector<std::string> tokens;
  std::vector<std::size_t> freq;
  tokens.reserve(df.size());
  freq.reserve(df.size());
  for (auto& [tok, n] : df) {
    tokens.push_back(tok);
    freq.push_back(n);
  }
  return Vocabulary(std::move(tokens), std::move(freq), corpus.size());
}

SparseMatrix transform_bow(std::span<const TokenSequence> docs, const Vocabulary& vocab) {
  return make_sparse(vocab.size(), count_rows(docs, vocab));
}

double smoothed_idf(std::size_t corpus_size, std::size_t document_frequency) {
  return std::log((1.0 + static_cast<double>(corpus_size)) / (1.0 + static_cast<double>(document_frequency))) + 1.0;
}

void TfidfModel::save(BinaryWriter& w) const {
  vocabulary.save(w);
  w.f64s(idf);
  w.boolean(row_normalize);
}

TfidfModel TfidfModel::load(BinaryReader& r) {
  TfidfModel m;
  m.vocabulary = Vocabulary::load(r);
  m.idf = r.f64s();
  m.row_normalize = r.boolean();
  if (m.idf.size() != m.vocabulary.size()) throw FormatError("tf-idf model: idf length mismatch");
  return m;
}

TfidfModel fit_tfidf(std::span<const TokenSequence> corpus, bool row_normalize) {
  TfidfModel model;
  model.vocabulary = fit_bow(corpus);
  model.row_normalize = row_normalize;
  model.idf.resize(model.vocabulary.size());
  for (std::size_t i = 0; i < model.idf.size(); ++i) {
    model.idf[i] = smoothed_idf(model.vocabulary.corpus_size(), model.vocabulary.document_frequency(i));
  }
  return model;
}

SparseMatrix transform_tfidf(std::span<const TokenSequence> docs, const TfidfModel& model) {
  auto rows = count_rows(docs, model.vocabulary);
  for (auto& row : rows) {
    double sq = 0.0;
    for (auto& e : row) {
      e.value *= model.idf[static_cast<std::size_t>(e.column)];
      sq += e.value * e.value;
    }
    if (model.row_normalize && sq > 0.0) {
      const double norm = std::sqrt(sq);
      for (auto& e : row) e.value /= norm;
    }
  }
  return make_sparse(model.vocabulary.size(), rows);
}

}  // namespace emo
