#include "emo/synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "emo/error.hpp"
#include "emo/rng.hpp"

namespace emo {
namespace {

constexpr std::array<std::string_view, 16> kOnsets = {"b", "d", "f", "g", "k", "l", "m", "n",
                                                      "p", "r", "s", "t", "v", "z", "sh", "tr"};
constexpr std::array<std::string_view, 5> kVowels = {"a", "e", "i", "o", "u"};

// Distinct pronounceable pseudo-words, two or three syllables long.
std::vector<std::string> make_words(std::size_t count, Rng& rng, std::set<std::string>& taken) {
  std::uniform_int_distribution<std::size_t> onset(0, kOnsets.size() - 1), vowel(0, kVowels.size() - 1),
      syllables(2, 3);
  std::vector<std::string> out;
  while (out.size() < count) {
    std::string w;
    for (std::size_t s = syllables(rng); s > 0; --s) {
      w += kOnsets[onset(rng)];
      w += kVowels[vowel(rng)];
    }
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

DatasetSplit make_split(const SyntheticConfig& cfg, const SyntheticCorpus& c, SplitRole role, std::size_t n,
                        Rng& rng) {
  DatasetSplit split{cfg.language, role, {}};
  std::uniform_int_distribution<std::size_t> label_words(3, 5), noise_words(4, 8), other(1, kNumEmotions - 1);
  std::bernoulli_distribution second(cfg.second_label_rate);
  for (std::size_t i = 0; i < n; ++i) {
    EmotionLabels labels;
    const std::size_t primary = (i + static_cast<std::size_t>(role)) % kNumEmotions;
    labels[primary] = 1;
    if (second(rng)) labels[(primary + other(rng)) % kNumEmotions] = 1;

    std::vector<std::string> tokens;
    for (std::size_t l = 0; l < kNumEmotions; ++l) {
      if (!labels[l]) continue;
      for (std::size_t k = label_words(rng); k > 0; --k) tokens.push_back(pick(c.label_words[l], rng));
    }
    for (std::size_t k = noise_words(rng); k > 0; --k) tokens.push_back(pick(c.noise_words, rng));
    std::shuffle(tokens.begin(), tokens.end(), rng);
    tokens.front()[0] = static_cast<char>(tokens.front()[0] - 'a' + 'A');

    std::string text;
    for (const auto& t : tokens) text += (text.empty() ? "" : " ") + t;
    text += '.';
    split.documents.push_back({fmt::format("{}_{}_{:04}", cfg.language, to_string(role), i + 1), text, labels});
  }
  return split;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& cfg) {
  if (cfg.train == 0 || cfg.words_per_label == 0 || cfg.noise_words == 0) {
    throw ConfigError("synthetic corpus: sizes must be positive");
  }
  Rng rng(cfg.seed);
  SyntheticCorpus c;
  std::set<std::string> taken;
  for (auto& words : c.label_words) words = make_words(cfg.words_per_label, rng, taken);
  c.noise_words = make_words(cfg.noise_words, rng, taken);
  c.train = make_split(cfg, c, SplitRole::train, cfg.train, rng);
  c.dev = make_split(cfg, c, SplitRole::dev, cfg.dev, rng);
  c.test = make_split(cfg, c, SplitRole::test, cfg.test, rng);
  return c;
}

void write_synthetic_corpus(const SyntheticCorpus& c, const SyntheticConfig& cfg, const std::filesystem::path& dir) {
  const auto lang_dir = dir / cfg.language;
  std::filesystem::create_directories(lang_dir);
  write_split(c.train, lang_dir / "train.csv");
  if (cfg.dev > 0) write_split(c.dev, lang_dir / "dev.csv");
  if (cfg.test > 0) write_split(c.test, lang_dir / "test.csv");

  // A separate stream keeps the text identical whatever the vector settings.
  Rng rng(derive_seed(cfg.seed, 1));
  std::normal_distribution<double> noise(0.0, 0.3);

  auto vec = open_out(dir / "vectors" / (cfg.language + ".vec"));
  const std::size_t words = c.noise_words.size() + kNumEmotions * cfg.words_per_label;
  vec << words << ' ' << cfg.vector_dim << '\n';
  auto write_word = [&](const std::string& w, int label) {
    vec << w;
    for (std::size_t k = 0; k < cfg.vector_dim; ++k) {
      const double v = noise(rng) + (label >= 0 && k == static_cast<std::size_t>(label) % cfg.vector_dim ? 3.0 : 0.0);
      vec << ' ' << fmt::format("{:.5f}", v);
    }
    vec << '\n';
  };
  for (std::size_t l = 0; l < kNumEmotions; ++l)
    for (const auto& w : c.label_words[l]) write_word(w, static_cast<int>(l));
  for (const auto& w : c.noise_words) write_word(w, -1);

  auto emb = open_out(dir / "embeddings" / (cfg.language + ".csv"));
  std::normal_distribution<double> jitter(0.0, 0.5);
  emb << "id";
  for (std::size_t k = 0; k < cfg.embedding_dim; ++k) emb << ",e" << k;
  emb << '\n';
  for (const auto* split : {&c.train, &c.dev, &c.test}) {
    for (const auto& d : split->documents) {
      emb << d.id;
      for (std::size_t k = 0; k < cfg.embedding_dim; ++k) {
        double v = jitter(rng);
        for (std::size_t l = 0; l < kNumEmotions; ++l)
          if ((*d.labels)[l] && k == l % cfg.embedding_dim) v += 2.0;
        emb << ',' << fmt::format("{:.5f}", v);
      }
      emb << '\n';
    }
  }
}

}  // namespace emo
