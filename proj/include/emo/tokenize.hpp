#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace emo {

struct TokenSequence {
  std::vector<std::string> tokens;
  std::string source_id;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

enum class TokenizerKind { unicode_words, whitespace, external_vocab };

std::string_view to_string(TokenizerKind kind);
TokenizerKind parse_tokenizer_kind(std::string_view name);  // "unicode-words" | "whitespace" | "external-vocab"

struct TokenizerSpec {
  TokenizerKind kind = TokenizerKind::unicode_words;
  bool lowercase = true;
  std::optional<std::filesystem::path> vocab_path;  // external-vocab only

  // Throws ConfigError when the vocabulary requirement is violated.
  void validate() const;
};

// Immutable after construction; tokenize() is safe to call concurrently.
class Tokenizer {
 public:
  // Reads the vocabulary file for external-vocab (one token per line).
  explicit Tokenizer(TokenizerSpec spec);

  // Builds an external-vocab tokenizer from an in-memory subword list.
  Tokenizer(TokenizerSpec spec, std::vector<std::string> vocabulary);

  TokenSequence tokenize(std::string_view text, std::string source_id = {}) const;

  const TokenizerSpec& spec() const noexcept { return spec_; }

  // Sorted subword vocabulary (empty unless external-vocab).
  std::vector<std::string> vocabulary() const;

 private:
  void index_vocabulary(std::vector<std::string> entries);
  void segment_greedy(std::string_view word, std::vector<std::string>& out) const;

  TokenizerSpec spec_;
  std::unordered_set<std::string> vocab_;
  std::size_t max_piece_code_points_ = 0;
};

TokenSequence tokenize(std::string_view text, const TokenizerSpec& spec);

}  // namespace emo
