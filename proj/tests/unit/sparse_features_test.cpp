#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "emo/error.hpp"
#include "emo/sparse_features.hpp"
#include "support/oracles.hpp"

using namespace emo;

namespace {

std::vector<TokenSequence> docs(std::initializer_list<std::vector<std::string>> list) {
  std::vector<TokenSequence> out;
  for (const auto& d : list) out.push_back({d, {}});
  return out;
}

std::vector<std::pair<int, double>> row(const SparseMatrix& m, int r) {
  std::vector<std::pair<int, double>> out;
  for (SparseMatrix::InnerIterator it(m, r); it; ++it) out.emplace_back(it.col(), it.value());
  return out;
}

}  // namespace

TEST(SparseFeatures, VocabularyAndDocumentFrequency) {
  const auto v = fit_bow(docs({{"a", "b"}, {"b", "c"}}));
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(v.document_frequency(0), 1u);
  EXPECT_EQ(v.document_frequency(1), 2u);
  EXPECT_EQ(v.document_frequency(2), 1u);
  EXPECT_EQ(v.corpus_size(), 2u);
}

TEST(SparseFeatures, FrequencyCountsPresenceNotOccurrences) {
  const auto single = fit_bow(docs({{"x", "x", "x"}}));
  EXPECT_EQ(single.document_frequency(0), 1u);
  EXPECT_EQ(single.corpus_size(), 1u);
  const auto three = fit_bow(docs({{"a"}, {"a"}, {"a"}}));
  EXPECT_EQ(three.document_frequency(0), 3u);
  EXPECT_EQ(three.corpus_size(), 3u);
}

TEST(SparseFeatures, EmptyCorpusVocabularyThrows) {
  EXPECT_THROW(fit_bow(docs({{}, {}})), EmptyVocabularyError);
}

TEST(SparseFeatures, BagOfWordsCounts) {
  const Vocabulary v({"a", "b"}, {1, 1}, 1);
  const auto m = transform_bow(docs({{"b", "b", "a"}, {"z"}, {}}), v);
  EXPECT_EQ(row(m, 0), (std::vector<std::pair<int, double>>{{0, 1.0}, {1, 2.0}}));
  EXPECT_TRUE(row(m, 1).empty());
  EXPECT_TRUE(row(m, 2).empty());
}

TEST(SparseFeatures, SmoothedIdfValues) {
  EXPECT_DOUBLE_EQ(smoothed_idf(3, 3), 1.0);
  EXPECT_NEAR(smoothed_idf(3, 1), 1.693147, 1e-6);
  EXPECT_DOUBLE_EQ(smoothed_idf(3, 1), std::log(2.0) + 1.0);
  EXPECT_DOUBLE_EQ(smoothed_idf(1, 1), 1.0);
}

TEST(SparseFeatures, SingleTokenRowNormalizesToOne) {
  const auto model = fit_tfidf(docs({{"a", "b"}, {"b"}}));
  const auto m = transform_tfidf(docs({{"a"}}), model);
  EXPECT_EQ(row(m, 0), (std::vector<std::pair<int, double>>{{0, 1.0}}));
}

TEST(SparseFeatures, HandComputedTfidfRow) {
  const auto corpus = docs({{"a", "b"}, {"b"}, {"b", "c"}});
  const auto raw = fit_tfidf(corpus, false);
  const auto m = transform_tfidf(docs({{"a", "b", "b"}}), raw);
  const double a = std::log(2.0) + 1.0;
  ASSERT_EQ(row(m, 0).size(), 2u);
  EXPECT_NEAR(row(m, 0)[0].second, 1.693147, 1e-6);
  EXPECT_DOUBLE_EQ(row(m, 0)[0].second, a);
  EXPECT_DOUBLE_EQ(row(m, 0)[1].second, 2.0);

  const auto normed = transform_tfidf(docs({{"a", "b", "b"}}), fit_tfidf(corpus, true));
  const double norm = std::sqrt(a * a + 4.0);
  EXPECT_NEAR(row(normed, 0)[0].second, a / norm, 1e-15);
  EXPECT_NEAR(row(normed, 0)[1].second, 2.0 / norm, 1e-15);
}

TEST(SparseFeatures, AllOovRowStaysZero) {
  const auto model = fit_tfidf(docs({{"a"}}));
  const auto m = transform_tfidf(docs({{"q", "r"}}), model);
  EXPECT_TRUE(row(m, 0).empty());
}

TEST(SparseFeatures, MatchesBruteForceOracleOnRandomCorpora) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    oracle::Docs raw;
    const std::size_t n = 1 + rng() % 15, vocab = 1 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> d;
      const std::size_t len = rng() % 10;
      for (std::size_t t = 0; t < len; ++t) d.push_back("w" + std::to_string(rng() % vocab));
      raw.push_back(d);
    }
    raw[0].push_back("w0");
    std::vector<TokenSequence> corpus;
    for (const auto& d : raw) corpus.push_back({d, {}});
    const auto model = fit_tfidf(corpus, true);
    const auto expected_idf = oracle::idf(raw);
    ASSERT_EQ(model.vocabulary.size(), expected_idf.size());
    for (std::size_t c = 0; c < model.vocabulary.size(); ++c)
      EXPECT_NEAR(model.idf[c], expected_idf.at(model.vocabulary.tokens()[c]), 1e-12);
    const auto m = transform_tfidf(corpus, model);
    const auto expected = oracle::tfidf(raw, raw, true);
    for (std::size_t r = 0; r < n; ++r) {
      const auto got = row(m, static_cast<int>(r));
      ASSERT_EQ(got.size(), expected[r].size());
      for (const auto& [c, v] : got) EXPECT_NEAR(v, expected[r].at(model.vocabulary.tokens()[c]), 1e-12);
    }
  }
}
