#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emo/feature_matrix.hpp"
#include "emo/tokenize.hpp"

namespace emo {

// Word -> vector lookup table with a fixed dimension. Lookup is exact-match.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension, std::string language = {}, std::filesystem::path source = {});

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return index_.size(); }
  const std::string& language() const noexcept { return language_; }
  const std::filesystem::path& source() const noexcept { return source_; }

  // Replaces an existing vector for the same token.
  void insert_or_assign(std::string token, std::span<const float> vector);
  std::optional<std::span<const float>> lookup(std::string_view token) const;

 private:
  std::size_t dim_;
  std::string language_;
  std::filesystem::path source_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> data_;
};

// Reads the fastText text format: an optional `<count> <dim>` header, then
// `token v1 ... vd` per line. `max_words` > 0 stops after that many rows.
EmbeddingTable load_word_vectors(const std::filesystem::path& path, std::string language = {},
                                 std::size_t max_words = 0);

struct OovReport {
  std::size_t documents = 0;
  std::size_t fully_oov_documents = 0;  // includes empty documents
  std::size_t tokens = 0;
  std::size_t oov_tokens = 0;
};

struct PooledEmbeddings {
  DenseMatrix matrix;
  OovReport oov;
};

// Mean of in-vocabulary token vectors per document; the zero vector when no
// token is known.
PooledEmbeddings embed_documents(std::span<const TokenSequence> docs, const EmbeddingTable& table);

// Reads `id,v1,...,vd` CSV (optional header row starting with `id`) or the
// word-vector text format keyed by id, and returns rows in `ids` order.
DenseMatrix load_precomputed_embeddings(const std::filesystem::path& path, std::span<const std::string> ids);

}  // namespace emo
