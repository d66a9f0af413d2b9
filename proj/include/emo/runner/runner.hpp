#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emo/evaluate.hpp"
#include "emo/language_fallback.hpp"
#include "emo/runner/config.hpp"

namespace emo {

// One experiment cell: language x representation x classifier x PCA flag.
struct CellKey {
  std::string language;
  std::string representation;
  std::string classifier;
  bool pca = false;

  // File-name-safe identifier, e.g. "hin__tfidf__mlp__pca".
  std::string id() const;

  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellResult {
  CellKey key;
  bool ok = false;
  std::string error;  // set when !ok
  std::optional<double> f1_macro;  // absent when the test split is unlabeled
  std::optional<double> dev_f1_macro;  // grid search winner's dev score
  std::optional<ConfusionRates> rates;
  TimingRecord timing;
  std::size_t n_train = 0;
  std::size_t n_dev = 0;
  std::size_t n_test = 0;
  std::size_t input_dim = 0;
  std::size_t feature_dim = 0;  // after reduction
  std::string resolved_language;
  std::string resolution;  // provenance for dense representations
  std::string model;       // classifier description (grid winner for mlp)
  bool resumed = false;
};

// Rows ordered by language, representation, PCA flag, classifier (config order).
struct ReportTable {
  std::vector<CellResult> rows;

  bool all_ok() const;
  const CellResult* find(const CellKey& key) const;
};

struct RunOptions {
  bool resume = false;
  // Used for fallback resolution instead of HTTP when set.
  std::shared_ptr<ChatTransport> transport;
};

// Runs every cell, persists per-cell results, predictions and (optionally)
// models under the output directory, and writes the report files. A failing
// cell is recorded in its row; the remaining cells still run.
ReportTable run_matrix(const ExperimentConfig& config, const RunOptions& options = {});

// run_matrix with PCA forced to {off, on} and a single worker, plus paired
// F1 and training-time tables with per-cell deltas (on minus off).
ReportTable run_ablation(ExperimentConfig config, const RunOptions& options = {});

// Writes `id,anger,...,surprise` predictions for an `id,text` CSV. For
// precomputed representations `embeddings` names the file holding the rows.
void predict_file(const std::filesystem::path& model, const std::filesystem::path& input,
                  const std::filesystem::path& output, const std::optional<std::filesystem::path>& embeddings = {});

std::filesystem::path cell_prediction_path(const std::filesystem::path& out_dir, const CellKey& key);
std::filesystem::path cell_model_path(const std::filesystem::path& out_dir, const CellKey& key);

struct VerifyResult {
  std::size_t checked = 0;
  std::vector<std::string> mismatches;
};

// Recomputes every F1 value in <out>/report.csv from the persisted prediction
// files and the gold test labels; values must agree exactly.
VerifyResult verify_outputs(const ExperimentConfig& config);

}  // namespace emo
