#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "emo/runner/config.hpp"
#include "emo/runner/runner.hpp"

namespace emo {

// A titled grid of strings, written as CSV or as aligned plain text.
struct TextTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& out) const;
  void write_text(std::ostream& out) const;
};

// Shortest decimal that parses back to the same double.
std::string exact_number(double v);

TextTable master_report(const ReportTable& t);
TextTable timing_report(const ReportTable& t);
TextTable representation_table(const ReportTable& t, const ExperimentConfig& c);  // F1, representations as columns
TextTable classifier_table(const ReportTable& t, const ExperimentConfig& c);      // F1, classifiers as columns
TextTable pca_train_time_table(const ReportTable& t, const ExperimentConfig& c);  // w/o and w/ PCA groups
TextTable pca_f1_table(const ReportTable& t, const ExperimentConfig& c);
TextTable confusion_report(const ReportTable& t);
TextTable train_test_time_table(const ReportTable& t, const ExperimentConfig& c);
TextTable all_scores_table(const ReportTable& t, const ExperimentConfig& c);

// Paired ablation tables: w/o PCA rows, w/ PCA rows, then on-minus-off deltas.
TextTable ablation_f1_table(const ReportTable& t, const ExperimentConfig& c);
TextTable ablation_train_time_table(const ReportTable& t, const ExperimentConfig& c);

// report.csv, f1_*.csv, confusion_rates.csv and tables.txt depend only on
// the predictions; timings.csv, *_time*.csv and timing_tables.txt hold clock
// readings.
void write_reports(const ReportTable& t, const ExperimentConfig& c, const std::filesystem::path& dir);
void write_ablation_reports(const ReportTable& t, const ExperimentConfig& c, const std::filesystem::path& dir);

}  // namespace emo
