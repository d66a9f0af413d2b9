#include "emo/evaluate.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

#include <array>

#include "emo/error.hpp"

namespace emo {

std::vector<LabelCounts> label_counts(const LabelMatrix& gold, const LabelMatrix& pred) {
  if (gold.rows() != pred.rows() || gold.cols() != pred.cols()) {
    throw ShapeError(fmt::format("label matrices differ in shape: {}x{} vs {}x{}", gold.rows(), gold.cols(),
                                 pred.rows(), pred.cols()));
  }
  gold.check_binary();
  pred.check_binary();
  std::vector<LabelCounts> counts(gold.cols());
  for (std::size_t i = 0; i < gold.rows(); ++i) {
    for (std::size_t j = 0; j < gold.cols(); ++j) {
      const bool g = gold(i, j), p = pred(i, j);
      auto& c = counts[j];
      if (g && p) ++c.tp;
      else if (!g && p) ++c.fp;
      else if (g && !p) ++c.fn;
      else ++c.tn;
    }
  }
  return counts;
}

std::vector<double> f1_per_label(const LabelMatrix& gold, const LabelMatrix& pred) {
  const auto counts = label_counts(gold, pred);
  std::vector<double> out;
  out.reserve(counts.size());
  for (const auto& c : counts) {
    const auto denom = 2 * c.tp + c.fp + c.fn;
    out.push_back(denom == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom));
  }
  return out;
}

double f1_macro(const LabelMatrix& gold, const LabelMatrix& pred) {
  using boost::multiprecision::cpp_rational;
  const auto counts = label_counts(gold, pred);
  if (counts.empty()) throw ShapeError("f1_macro: no labels");
  cpp_rational sum = 0;
  for (const auto& c : counts) {
    const auto denom = 2 * c.tp + c.fp + c.fn;
    if (denom != 0) sum += cpp_rational(2 * c.tp, denom);
  }
  sum /= static_cast<unsigned long long>(counts.size());
  return sum.convert_to<double>();
}

ConfusionRates confusion_rates(const LabelMatrix& gold, const LabelMatrix& pred) {
  const auto counts = label_counts(gold, pred);
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  ConfusionRates rates;
  for (const auto& c : counts) {
    rates.labels.push_back({ratio(c.tp, c.tp + c.fn), ratio(c.tn, c.tn + c.fp), ratio(c.fp, c.fp + c.tn),
                            ratio(c.fn, c.fn + c.tp)});
  }
  return rates;
}

std::string format_rate(const std::optional<double>& rate) {
  return rate ? fmt::format("{:.4f}", *rate) : std::string("n/a");
}

std::string confusion_table(const ConfusionRates& rates, std::span<const std::string_view> label_names) {
  if (label_names.size() != rates.labels.size()) throw ShapeError("confusion_table: label name count mismatch");
  std::size_t width = 6;
  for (auto n : label_names) width = std::max(width, n.size());
  std::string out = fmt::format("{:<3}", "");
  for (auto n : label_names) out += fmt::format(" {:>{}}", n, width);
  out += '\n';
  const std::array<std::pair<const char*, std::optional<double> LabelRates::*>, 4> rows = {{
      {"TP", &LabelRates::tp_rate},
      {"TN", &LabelRates::tn_rate},
      {"FP", &LabelRates::fp_rate},
      {"FN", &LabelRates::fn_rate},
  }};
  for (const auto& [name, member] : rows) {
    out += fmt::format("{:<3}", name);
    for (const auto& l : rates.labels) out += fmt::format(" {:>{}}", format_rate(l.*member), width);
    out += '\n';
  }
  return out;
}

std::string format_seconds(double seconds) {
  if (seconds != 0.0 && std::abs(seconds) < 1e-4) return fmt::format("{:.2e}", seconds);
  return fmt::format("{:.4f}", seconds);
}

}  // namespace emo
