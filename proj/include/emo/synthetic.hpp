#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emo/corpus.hpp"

namespace emo {

// Toy multi-label corpus: every document belongs to one of six clusters (one
// per emotion) and may carry a second label. Each label owns a private word
// list; all documents also draw from a shared pool of noise words.
struct SyntheticConfig {
  std::uint64_t seed = 13;
  std::string language = "syn";
  std::size_t train = 400;
  std::size_t dev = 100;
  std::size_t test = 100;
  std::size_t words_per_label = 12;
  std::size_t noise_words = 60;
  double second_label_rate = 0.25;
  std::size_t vector_dim = 24;
  std::size_t embedding_dim = 16;
};

struct SyntheticCorpus {
  DatasetSplit train;
  DatasetSplit dev;
  DatasetSplit test;
  std::array<std::vector<std::string>, kNumEmotions> label_words;
  std::vector<std::string> noise_words;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& config);

// Writes <dir>/<lang>/{train,dev,test}.csv, a word-vector file
// <dir>/vectors/<lang>.vec and per-document embeddings <dir>/embeddings/<lang>.csv.
void write_synthetic_corpus(const SyntheticCorpus& corpus, const SyntheticConfig& config,
                            const std::filesystem::path& dir);

}  // namespace emo
