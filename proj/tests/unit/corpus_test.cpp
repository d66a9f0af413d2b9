#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "emo/corpus.hpp"
#include "emo/csv.hpp"
#include "emo/error.hpp"
#include "support/temp_dir.hpp"

using namespace emo;
using testing_support::TempDir;

namespace {

constexpr std::string_view kHeader = "id,text,anger,disgust,fear,joy,sadness,surprise\n";

DatasetSplit split_with_anger(std::size_t n, std::size_t positives) {
  DatasetSplit s;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledDocument d{"d" + std::to_string(i), "t", EmotionLabels{}};
    (*d.labels)[Emotion::anger] = i < positives ? 1 : 0;
    s.documents.push_back(d);
  }
  return s;
}

}  // namespace

TEST(Corpus, SingleRowMapsFields) {
  TempDir dir;
  const auto p = dir.write("train.csv", std::string(kHeader) + "x1,\"hello\",0,0,0,1,0,0\n");
  const auto split = load_split(p, SplitRole::train, "eng");
  ASSERT_EQ(split.size(), 1u);
  EXPECT_EQ(split.documents[0].id, "x1");
  EXPECT_EQ(split.documents[0].text, "hello");
  ASSERT_TRUE(split.documents[0].labels);
  for (std::size_t j = 0; j < kNumEmotions; ++j) EXPECT_EQ((*split.documents[0].labels)[j], j == 3 ? 1 : 0);
}

TEST(Corpus, NonBinaryLabelIsParseError) {
  TempDir dir;
  const auto p = dir.write("train.csv", std::string(kHeader) + "x1,a,0,0,0,1,0,0\nx2,b,2,0,0,0,0,0\n");
  try {
    load_split(p, SplitRole::train);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("anger cell '2'"), std::string::npos) << e.what();
  }
}

TEST(Corpus, MissingLabelColumnsInTrainIsSchemaError) {
  TempDir dir;
  const auto p = dir.write("train.csv", "id,text\nx1,a\n");
  EXPECT_THROW(load_split(p, SplitRole::train), SchemaError);
  const auto split = load_split(p, SplitRole::test);
  EXPECT_FALSE(split.labeled());
  EXPECT_THROW(split.label_matrix(), NoLabelsError);
}

TEST(Corpus, QuotedMultilineTextSurvives) {
  TempDir dir;
  const auto p = dir.write("dev.csv", std::string(kHeader) + "x1,\"line one\nline \"\"two\"\", end\",1,0,0,0,0,1\r\n");
  const auto split = load_split(p, SplitRole::dev);
  ASSERT_EQ(split.size(), 1u);
  EXPECT_EQ(split.documents[0].text, "line one\nline \"two\", end");
}

TEST(Corpus, WriteThenLoadRoundTrips) {
  std::mt19937_64 rng(5);
  const std::string alphabet = "ab ,\"\n\xc3\xa9x";
  for (int trial = 0; trial < 50; ++trial) {
    DatasetSplit split;
    split.role = SplitRole::train;
    const std::size_t n = 1 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      std::string text = "t";
      const std::size_t len = rng() % 12;
      for (std::size_t c = 0; c < len; ++c) {
        const std::size_t k = rng() % alphabet.size();
        if (alphabet[k] == '\xc3') {
          text += "\xc3\xa9";
        } else if (alphabet[k] != '\xa9') {
          text += alphabet[k];
        }
      }
      EmotionLabels labels;
      for (auto& b : labels.bits) b = rng() % 2;
      split.documents.push_back({"id" + std::to_string(i), text, labels});
    }
    TempDir dir;
    write_split(split, dir / "s.csv");
    const auto back = load_split(dir / "s.csv", SplitRole::train);
    ASSERT_EQ(back.documents, split.documents);
  }
}

TEST(Corpus, CsvEscapeQuotesOnlyWhenNeeded) {
  EXPECT_EQ(csv::escape("plain"), "plain");
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::istringstream in("\xEF\xBB\xBFid,text\n");
  csv::Reader r(in);
  const auto rec = r.next();
  ASSERT_TRUE(rec);
  EXPECT_EQ(rec->fields[0], "id");
}

TEST(Corpus, UnterminatedQuoteIsParseError) {
  std::istringstream in("a,\"open\n");
  csv::Reader r(in);
  EXPECT_THROW(r.next(), ParseError);
}

TEST(Corpus, DeclaredSizesMatchPublishedTotals) {
  const auto sizes = brighter_declared_sizes();
  EXPECT_EQ(sizes.size(), 28u);
  const std::size_t train = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0},
                                            [](std::size_t a, const DeclaredSizes& d) { return a + d.train; });
  EXPECT_EQ(train, 65098u);
  const auto* rus = find_declared_sizes("Russian");
  ASSERT_NE(rus, nullptr);
  EXPECT_EQ(rus, find_declared_sizes("rus"));
  EXPECT_EQ(rus->train, 2679u);
  EXPECT_EQ(rus->dev, 199u);
  EXPECT_EQ(rus->test, 1000u);
}

TEST(Corpus, RussianSizedSplitPassesCountCheck) {
  TempDir dir;
  std::string content(kHeader);
  for (int i = 0; i < 2679; ++i) content += "rus_" + std::to_string(i) + ",text,0,0,1,0,0,0\n";
  const auto split = load_split(dir.write("train.csv", content), SplitRole::train, "rus");
  EXPECT_EQ(split.size(), 2679u);
  EXPECT_NO_THROW(check_declared_count(split, find_declared_sizes("rus")->train));
  EXPECT_THROW(check_declared_count(split, 2680), SchemaError);
}

TEST(Corpus, AngerImbalanceFraction) {
  const auto stats = summarize(split_with_anger(2556, 562));
  EXPECT_EQ(stats[0].positives, 562u);
  EXPECT_NEAR(stats[0].positive_fraction, 0.2199, 5e-5);
  EXPECT_GT(stats[0].negative_fraction, 0.78);
}

TEST(Corpus, AllPositiveAndHandCountedStats) {
  EXPECT_DOUBLE_EQ(summarize(split_with_anger(4, 4))[0].positive_fraction, 1.0);

  DatasetSplit s;
  for (int b : {1, 0, 1}) {
    EmotionLabels l;
    l[Emotion::joy] = static_cast<std::uint8_t>(b);
    s.documents.push_back({"x", "t", l});
  }
  const auto joy = summarize(s)[3];
  EXPECT_EQ(joy.positives, 2u);
  EXPECT_EQ(joy.negatives, 1u);
  EXPECT_DOUBLE_EQ(joy.positive_fraction, 2.0 / 3.0);
}
