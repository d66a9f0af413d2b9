#include "emo/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "emo/csv.hpp"
#include "emo/error.hpp"

namespace emo {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string row_ref(std::size_t row, std::size_t line) {
  return "row " + std::to_string(row) + " (line " + std::to_string(line) + ")";
}

constexpr std::array<DeclaredSizes, 28> kDeclared = {{
    {"pcm", "Nigerian pidgin", 3728, 620, 1870},
    {"tir", "Tigrinya", 3681, 614, 1840},
    {"amh", "Amharic", 3549, 592, 1774},
    {"orm", "Oromo", 3442, 574, 1721},
    {"som", "Somali", 3392, 566, 1696},
    {"swa", "Swahili", 3307, 551, 1656},
    {"yor", "Yoruba", 2992, 497, 1500},
    {"ibo", "Igbo", 2880, 479, 1444},
    {"eng", "English", 2768, 116, 2767},
    {"rus", "Russian", 2679, 199, 1000},
    {"chn", "Chinese", 2642, 200, 2642},
    {"deu", "German", 2603, 200, 2604},
    {"hin", "Hindi", 2556, 100, 1010},
    {"ukr", "Ukrainian", 2466, 249, 2234},
    {"kin", "Kinyarwanda", 2451, 407, 1231},
    {"mar", "Marathi", 2415, 100, 1000},
    {"ptbr", "Portuguese(Brazilian)", 2226, 200, 2226},
    {"hau", "Hausa", 2145, 356, 1080},
    {"esp", "Spanish", 1996, 184, 1695},
    {"ary", "Moroccan Arabic", 1608, 267, 812},
    {"vmw", "Makhuwa", 1551, 258, 777},
    {"ptmz", "Portuguese(Mozambican)", 1546, 257, 776},
    {"ron", "Romanian", 1241, 123, 1119},
    {"afr", "Afrikaans", 1222, 98, 1065},
    {"swe", "Swedish", 1187, 200, 1188},
    {"tat", "Tatar", 1000, 200, 1000},
    {"sun", "Sundanese", 924, 199, 926},
    {"arq", "Algerian Arabic", 901, 100, 902},
}};

}  // namespace

std::string_view to_string(SplitRole role) {
  switch (role) {
    case SplitRole::train: return "train";
    case SplitRole::dev: return "dev";
    case SplitRole::test: return "test";
  }
  return "?";
}

SplitRole parse_split_role(std::string_view name) {
  if (name == "train") return SplitRole::train;
  if (name == "dev") return SplitRole::dev;
  if (name == "test") return SplitRole::test;
  throw ConfigError("unknown split role '" + std::string(name) + "'");
}

bool DatasetSplit::labeled() const noexcept {
  return std::all_of(documents.begin(), documents.end(),
                     [](const LabeledDocument& d) { return d.labels.has_value(); });
}

std::vector<std::string> DatasetSplit::ids() const {
  std::vector<std::string> out;
  out.reserve(documents.size());
  for (const auto& d : documents) out.push_back(d.id);
  return out;
}

LabelMatrix DatasetSplit::label_matrix() const {
  LabelMatrix m(documents.size(), kNumEmotions);
  for (std::size_t i = 0; i < documents.size(); ++i) {
    const auto& labels = documents[i].labels;
    if (!labels) throw NoLabelsError("document '" + documents[i].id + "' has no labels");
    for (std::size_t j = 0; j < kNumEmotions; ++j) m(i, j) = (*labels)[j];
  }
  return m;
}

DatasetSplit load_split(const std::filesystem::path& path, SplitRole role, std::string language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open dataset file " + path.string());

  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || (header->fields.size() == 1 && trim(header->fields[0]).empty())) {
    throw EmptyDatasetError("empty dataset file " + path.string());
  }

  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header->fields.size(); ++i) {
    column.emplace(std::string(trim(header->fields[i])), i);
  }
  auto require = [&](std::string_view name) {
    auto it = column.find(std::string(name));
    if (it == column.end()) {
      throw SchemaError(path.string() + ": missing column '" + std::string(name) + "'");
    }
    return it->second;
  };

  const std::size_t id_col = require("id");
  const std::size_t text_col = require("text");

  std::size_t label_present = 0;
  for (auto name : kEmotionNames) label_present += column.count(std::string(name));
  const bool expect_labels = role != SplitRole::test || label_present > 0;
  std::array<std::size_t, kNumEmotions> label_cols{};
  if (expect_labels) {
    for (std::size_t j = 0; j < kNumEmotions; ++j) label_cols[j] = require(kEmotionNames[j]);
  }

  DatasetSplit split;
  split.language = std::move(language);
  split.role = role;
  std::unordered_set<std::string> seen;

  std::size_t row = 0;
  while (auto rec = reader.next()) {
    ++row;
    auto& f = rec->fields;
    if (f.size() == 1 && trim(f[0]).empty()) continue;  // blank line
    if (f.size() != header->fields.size()) {
      throw ParseError(path.string() + ": " + row_ref(row, rec->line) + " has " + std::to_string(f.size()) +
                       " fields, header has " + std::to_string(header->fields.size()));
    }
    LabeledDocument doc;
    doc.id = std::string(trim(f[id_col]));
    doc.text = std::move(f[text_col]);
    if (doc.id.empty()) throw ParseError(path.string() + ": " + row_ref(row, rec->line) + " has an empty id");
    if (trim(doc.text).empty()) {
      throw ParseError(path.string() + ": " + row_ref(row, rec->line) + " has empty text");
    }
    if (!seen.insert(doc.id).second) {
      throw ParseError(path.string() + ": duplicate id '" + doc.id + "' at " + row_ref(row, rec->line));
    }
    if (expect_labels) {
      EmotionLabels labels;
      for (std::size_t j = 0; j < kNumEmotions; ++j) {
        const auto cell = trim(f[label_cols[j]]);
        if (cell == "0") {
          labels[j] = 0;
        } else if (cell == "1") {
          labels[j] = 1;
        } else {
          throw ParseError(path.string() + ": " + row_ref(row, rec->line) + ": " + std::string(kEmotionNames[j]) +
                           " cell '" + std::string(cell) + "' is not 0 or 1");
        }
      }
      doc.labels = labels;
    }
    split.documents.push_back(std::move(doc));
  }

  if (split.documents.empty()) throw EmptyDatasetError("no documents in " + path.string());
  return split;
}

void write_split(const DatasetSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const bool labeled = !split.documents.empty() && split.labeled();
  std::vector<std::string> header = {"id", "text"};
  if (labeled) header.insert(header.end(), kEmotionNames.begin(), kEmotionNames.end());
  csv::write_row(out, header);
  for (const auto& d : split.documents) {
    std::vector<std::string> row = {d.id, d.text};
    if (labeled) {
      for (std::size_t j = 0; j < kNumEmotions; ++j) row.push_back((*d.labels)[j] ? "1" : "0");
    }
    csv::write_row(out, row);
  }
}

std::array<LabelStats, kNumEmotions> summarize(const DatasetSplit& split) {
  if (split.documents.empty() || !split.labeled()) {
    throw NoLabelsError("summarize: split '" + split.language + "/" + std::string(to_string(split.role)) +
                        "' has no labels");
  }
  std::array<LabelStats, kNumEmotions> stats{};
  for (const auto& d : split.documents) {
    for (std::size_t j = 0; j < kNumEmotions; ++j) ((*d.labels)[j] ? stats[j].positives : stats[j].negatives)++;
  }
  const double n = static_cast<double>(split.documents.size());
  for (auto& s : stats) {
    s.positive_fraction = static_cast<double>(s.positives) / n;
    // 1 - p keeps p + (1 - p) == 1 exactly in binary64.
    s.negative_fraction = 1.0 - s.positive_fraction;
  }
  return stats;
}

std::size_t DeclaredSizes::count(SplitRole role) const noexcept {
  switch (role) {
    case SplitRole::train: return train;
    case SplitRole::dev: return dev;
    case SplitRole::test: return test;
  }
  return 0;
}

std::span<const DeclaredSizes> brighter_declared_sizes() { return kDeclared; }

const DeclaredSizes* find_declared_sizes(std::string_view code_or_name) {
  for (const auto& d : kDeclared) {
    if (d.code == code_or_name || d.name == code_or_name) return &d;
  }
  return nullptr;
}

void check_declared_count(const DatasetSplit& split, std::size_t declared) {
  if (split.size() != declared) {
    throw SchemaError(split.language + "/" + std::string(to_string(split.role)) + ": loaded " +
                      std::to_string(split.size()) + " documents, declared " + std::to_string(declared));
  }
}

}  // namespace emo
