#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emo/labels.hpp"

namespace emo {

enum class SplitRole { train, dev, test };

std::string_view to_string(SplitRole role);
SplitRole parse_split_role(std::string_view name);

struct LabeledDocument {
  std::string id;
  std::string text;
  std::optional<EmotionLabels> labels;  // absent for unlabeled test files

  friend bool operator==(const LabeledDocument&, const LabeledDocument&) = default;
};

// Documents in load order. Immutable after loading.
struct DatasetSplit {
  std::string language;
  SplitRole role = SplitRole::train;
  std::vector<LabeledDocument> documents;

  std::size_t size() const noexcept { return documents.size(); }
  bool labeled() const noexcept;
  std::vector<std::string> ids() const;

  // Throws NoLabelsError if any document lacks labels.
  LabelMatrix label_matrix() const;
};

// Loads a BRIGHTER-style CSV (`id,text,anger,...,surprise`, extra columns ignored).
// Train and dev files must carry all six label columns; a test file may carry
// none of them, in which case labels are left absent.
DatasetSplit load_split(const std::filesystem::path& path, SplitRole role, std::string language = {});

// Writes the split back in the same dialect; label columns only when labeled.
void write_split(const DatasetSplit& split, const std::filesystem::path& path);

struct LabelStats {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double positive_fraction = 0.0;
  double negative_fraction = 0.0;
};

std::array<LabelStats, kNumEmotions> summarize(const DatasetSplit& split);

// Published split sizes of the shared-task data, for reconciliation on load.
struct DeclaredSizes {
  std::string_view code;
  std::string_view name;
  std::size_t train;
  std::size_t dev;
  std::size_t test;

  std::size_t count(SplitRole role) const noexcept;
};

std::span<const DeclaredSizes> brighter_declared_sizes();

// Accepts either the dataset code ("rus") or the English name ("Russian").
const DeclaredSizes* find_declared_sizes(std::string_view code_or_name);

// Throws SchemaError when the split size differs from the declared count.
void check_declared_count(const DatasetSplit& split, std::size_t declared);

}  // namespace emo
