#include "emo/tokenize.hpp"

#include <algorithm>
#include <fstream>

#include "emo/error.hpp"
#include "emo/unicode.hpp"

namespace emo {

std::string_view to_string(TokenizerKind kind) {
  switch (kind) {
    case TokenizerKind::unicode_words: return "unicode-words";
    case TokenizerKind::whitespace: return "whitespace";
    case TokenizerKind::external_vocab: return "external-vocab";
  }
  return "?";
}

TokenizerKind parse_tokenizer_kind(std::string_view name) {
  if (name == "unicode-words") return TokenizerKind::unicode_words;
  if (name == "whitespace") return TokenizerKind::whitespace;
  if (name == "external-vocab") return TokenizerKind::external_vocab;
  throw ConfigError("unknown tokenizer kind '" + std::string(name) + "'");
}

void TokenizerSpec::validate() const {
  if (kind == TokenizerKind::external_vocab && !vocab_path) {
    throw ConfigError("external-vocab tokenizer requires a vocabulary file");
  }
  if (kind != TokenizerKind::external_vocab && vocab_path) {
    throw ConfigError(std::string(to_string(kind)) + " tokenizer does not take a vocabulary file");
  }
}

Tokenizer::Tokenizer(TokenizerSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.kind != TokenizerKind::external_vocab) return;

  std::ifstream in(*spec_.vocab_path, std::ios::binary);
  if (!in) throw ConfigError("cannot read vocabulary file " + spec_.vocab_path->string());
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) entries.push_back(std::move(line));
  }
  index_vocabulary(std::move(entries));
}

Tokenizer::Tokenizer(TokenizerSpec spec, std::vector<std::string> vocabulary) : spec_(std::move(spec)) {
  if (spec_.kind != TokenizerKind::external_vocab) {
    throw ConfigError("only external-vocab tokenizers take a vocabulary");
  }
  index_vocabulary(std::move(vocabulary));
}

void Tokenizer::index_vocabulary(std::vector<std::string> entries) {
  for (auto& e : entries) {
    unicode::validate_utf8(e);
    if (spec_.lowercase) e = unicode::fold_case(e);
    max_piece_code_points_ = std::max(max_piece_code_points_, unicode::code_point_offsets(e).size() - 1);
    vocab_.insert(std::move(e));
  }
  if (vocab_.empty()) throw ConfigError("vocabulary file is empty");
}

std::vector<std::string> Tokenizer::vocabulary() const {
  std::vector<std::string> out(vocab_.begin(), vocab_.end());
  std::sort(out.begin(), out.end());
  return out;
}

void Tokenizer::segment_greedy(std::string_view word, std::vector<std::string>& out) const {
  const auto offsets = unicode::code_point_offsets(word);
  const std::size_t n = offsets.size() - 1;
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t len = std::min(max_piece_code_points_, n - pos);
    for (; len > 0; --len) {
      const auto piece = word.substr(offsets[pos], offsets[pos + len] - offsets[pos]);
      if (vocab_.count(std::string(piece))) break;
    }
    if (len == 0) len = 1;  // unknown code point becomes its own token
    out.emplace_back(word.substr(offsets[pos], offsets[pos + len] - offsets[pos]));
    pos += len;
  }
}

TokenSequence Tokenizer::tokenize(std::string_view text, std::string source_id) const {
  std::string folded;
  if (spec_.lowercase) {
    folded = unicode::fold_case(text);
    text = folded;
  }
  TokenSequence seq;
  seq.source_id = std::move(source_id);
  switch (spec_.kind) {
    case TokenizerKind::unicode_words:
      seq.tokens = unicode::word_segments(text);
      break;
    case TokenizerKind::whitespace:
      seq.tokens = unicode::whitespace_split(text);
      break;
    case TokenizerKind::external_vocab:
      for (const auto& word : unicode::whitespace_split(text)) segment_greedy(word, seq.tokens);
      break;
  }
  return seq;
}

TokenSequence tokenize(std::string_view text, const TokenizerSpec& spec) { return Tokenizer(spec).tokenize(text); }

}  // namespace emo
