#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emo/labels.hpp"

namespace emo {

struct LabelCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

// Throws ShapeError on mismatched shapes, ParseError on non-binary entries.
std::vector<LabelCounts> label_counts(const LabelMatrix& gold, const LabelMatrix& pred);

// Per-label F1 = 2TP / (2TP + FP + FN); a label with no true, predicted or
// gold positives scores 0.
std::vector<double> f1_per_label(const LabelMatrix& gold, const LabelMatrix& pred);

// Unweighted mean of per-label F1, evaluated in exact rational arithmetic and
// rounded once to the nearest double.
double f1_macro(const LabelMatrix& gold, const LabelMatrix& pred);

// Rates with an empty denominator are std::nullopt ("n/a").
struct LabelRates {
  std::optional<double> tp_rate;  // recall, TP / (TP + FN)
  std::optional<double> tn_rate;  // specificity, TN / (TN + FP)
  std::optional<double> fp_rate;  // FP / (FP + TN)
  std::optional<double> fn_rate;  // FN / (FN + TP)
};

struct ConfusionRates {
  std::vector<LabelRates> labels;
};

ConfusionRates confusion_rates(const LabelMatrix& gold, const LabelMatrix& pred);

// Rows TP/TN/FP/FN, one column per label, four decimals, "n/a" for undefined.
std::string confusion_table(const ConfusionRates& rates, std::span<const std::string_view> label_names);

struct TimingRecord {
  double representation_seconds = 0.0;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

// Wall-clock duration of `action` in seconds, from std::chrono::steady_clock
// (nanosecond ticks on the supported platforms).
template <typename F>
double time_run(F&& action) {
  const auto start = std::chrono::steady_clock::now();
  std::forward<F>(action)();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

// Four decimals, switching to three significant digits in scientific notation
// below 1e-4 so that short durations never print as 0.0000.
std::string format_seconds(double seconds);

std::string format_rate(const std::optional<double>& rate);

}  // namespace emo
