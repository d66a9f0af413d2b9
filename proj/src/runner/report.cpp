#include "emo/runner/report.hpp"

#include <fmt/format.h>

#include <fstream>
#include <functional>

#include "emo/csv.hpp"
#include "emo/error.hpp"
#include "emo/labels.hpp"

namespace emo {
namespace {

using CellFormat = std::function<std::string(const CellResult&)>;

constexpr std::string_view kWithoutPca = "w/o PCA";
constexpr std::string_view kWithPca = "w/ PCA";
constexpr std::string_view kDelta = "delta (w/ - w/o)";

std::string f1_text(const CellResult& c) {
  if (!c.ok) return "error";
  return c.f1_macro ? fmt::format("{:.4f}", *c.f1_macro) : "n/a";
}

std::string f1_exact(const CellResult& c) {
  if (!c.ok) return "error";
  return c.f1_macro ? exact_number(*c.f1_macro) : "n/a";
}

std::string train_text(const CellResult& c) { return c.ok ? format_seconds(c.timing.train_seconds) : "error"; }
std::string train_exact(const CellResult& c) { return c.ok ? exact_number(c.timing.train_seconds) : "error"; }
std::string predict_text(const CellResult& c) { return c.ok ? format_seconds(c.timing.predict_seconds) : "error"; }

std::string on_off(bool pca) { return pca ? "on" : "off"; }

std::string lookup(const ReportTable& t, const CellKey& key, const CellFormat& format) {
  const CellResult* c = t.find(key);
  return c ? format(*c) : "";
}

// w/o and w/ PCA groups per language, representations as rows, classifiers as columns.
TextTable grouped_by_pca(const ReportTable& t, const ExperimentConfig& c, std::string title, const CellFormat& format) {
  TextTable out{std::move(title), {"language", "setting", "representation"}, {}};
  for (const auto& clf : c.classifiers) out.header.push_back(clf.name);
  for (const auto& lang : c.languages) {
    for (bool pca : {false, true}) {
      if (std::find(c.pca.begin(), c.pca.end(), pca) == c.pca.end()) continue;
      for (const auto& rep : c.representations) {
        std::vector<std::string> row{lang, std::string(pca ? kWithPca : kWithoutPca), rep.name};
        for (const auto& clf : c.classifiers) row.push_back(lookup(t, {lang, rep.name, clf.name, pca}, format));
        out.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

// grouped_by_pca plus on-minus-off rows; `value` yields the number behind a cell.
TextTable with_deltas(const ReportTable& t, const ExperimentConfig& c, std::string title, const CellFormat& format,
                      const std::function<std::optional<double>(const CellResult&)>& value,
                      const std::function<std::string(double)>& format_delta) {
  TextTable out = grouped_by_pca(t, c, std::move(title), format);
  std::vector<std::vector<std::string>> rows;
  for (const auto& lang : c.languages) {
    for (const auto& row : out.rows)
      if (row[0] == lang) rows.push_back(row);
    for (const auto& rep : c.representations) {
      std::vector<std::string> row{lang, std::string(kDelta), rep.name};
      for (const auto& clf : c.classifiers) {
        const CellResult* off = t.find({lang, rep.name, clf.name, false});
        const CellResult* on = t.find({lang, rep.name, clf.name, true});
        std::optional<double> a = off && off->ok ? value(*off) : std::nullopt;
        std::optional<double> b = on && on->ok ? value(*on) : std::nullopt;
        row.push_back(a && b ? format_delta(*b - *a) : "n/a");
      }
      rows.push_back(std::move(row));
    }
  }
  out.rows = std::move(rows);
  return out;
}

std::optional<double> f1_value(const CellResult& c) { return c.f1_macro; }
std::optional<double> train_value(const CellResult& c) { return c.timing.train_seconds; }

void write_csv_file(const TextTable& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  t.write_csv(out);
}

void write_text_file(const std::vector<TextTable>& tables, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out << '\n';
    tables[i].write_text(out);
  }
}

}  // namespace

void TextTable::write_csv(std::ostream& out) const {
  csv::write_row(out, header);
  for (const auto& r : rows) csv::write_row(out, r);
}

void TextTable::write_text(std::ostream& out) const {
  std::vector<std::size_t> width(header.size(), 0);
  auto measure = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  };
  measure(header);
  for (const auto& r : rows) measure(r);
  auto line = [&](const std::vector<std::string>& r) {
    std::string s;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += "  ";
      s += i == 0 ? fmt::format("{:<{}}", r[i], width[i]) : fmt::format("{:>{}}", r[i], width[i]);
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << '\n';
  };
  out << title << '\n';
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << '\n';
  for (const auto& r : rows) line(r);
}

std::string exact_number(double v) { return fmt::format("{}", v); }

TextTable master_report(const ReportTable& t) {
  TextTable out{"Experiment cells",
                {"language", "representation", "classifier", "pca", "status", "f1_macro", "dev_f1_macro", "n_train",
                 "n_dev", "n_test", "input_dim", "feature_dim", "resolved_language", "resolution", "model", "error"},
                {}};
  for (const auto& c : t.rows) {
    out.rows.push_back({c.key.language, c.key.representation, c.key.classifier, on_off(c.key.pca),
                        c.ok ? "ok" : "error", c.ok ? f1_exact(c) : "",
                        c.dev_f1_macro ? exact_number(*c.dev_f1_macro) : "", std::to_string(c.n_train),
                        std::to_string(c.n_dev), std::to_string(c.n_test), std::to_string(c.input_dim),
                        std::to_string(c.feature_dim), c.resolved_language, c.resolution, c.model, c.error});
  }
  return out;
}

TextTable timing_report(const ReportTable& t) {
  TextTable out{"Wall-clock seconds per cell",
                {"language", "representation", "classifier", "pca", "representation_seconds", "train_seconds",
                 "predict_seconds"},
                {}};
  for (const auto& c : t.rows) {
    if (!c.ok) continue;
    out.rows.push_back({c.key.language, c.key.representation, c.key.classifier, on_off(c.key.pca),
                        exact_number(c.timing.representation_seconds), exact_number(c.timing.train_seconds),
                        exact_number(c.timing.predict_seconds)});
  }
  return out;
}

TextTable representation_table(const ReportTable& t, const ExperimentConfig& c) {
  TextTable out{"F1-macro by document representation", {"classifier", "pca", "language"}, {}};
  for (const auto& rep : c.representations) out.header.push_back(rep.name);
  for (const auto& clf : c.classifiers)
    for (bool pca : c.pca)
      for (const auto& lang : c.languages) {
        std::vector<std::string> row{clf.name, on_off(pca), lang};
        for (const auto& rep : c.representations) row.push_back(lookup(t, {lang, rep.name, clf.name, pca}, f1_text));
        out.rows.push_back(std::move(row));
      }
  return out;
}

TextTable classifier_table(const ReportTable& t, const ExperimentConfig& c) {
  TextTable out{"F1-macro by learning algorithm", {"representation", "pca", "language"}, {}};
  for (const auto& clf : c.classifiers) out.header.push_back(clf.name);
  for (const auto& rep : c.representations)
    for (bool pca : c.pca)
      for (const auto& lang : c.languages) {
        std::vector<std::string> row{rep.name, on_off(pca), lang};
        for (const auto& clf : c.classifiers) row.push_back(lookup(t, {lang, rep.name, clf.name, pca}, f1_text));
        out.rows.push_back(std::move(row));
      }
  return out;
}

TextTable pca_train_time_table(const ReportTable& t, const ExperimentConfig& c) {
  return grouped_by_pca(t, c, "Training time in seconds with and without PCA", train_text);
}

TextTable pca_f1_table(const ReportTable& t, const ExperimentConfig& c) {
  return grouped_by_pca(t, c, "F1-macro with and without PCA", f1_text);
}

TextTable confusion_report(const ReportTable& t) {
  TextTable out{"Per-label confusion rates", {"language", "representation", "classifier", "pca", "rate"}, {}};
  out.header.insert(out.header.end(), kEmotionNames.begin(), kEmotionNames.end());
  for (const auto& c : t.rows) {
    if (!c.ok || !c.rates) continue;
    const std::array<std::pair<const char*, std::optional<double> LabelRates::*>, 4> kinds = {
        {{"TP", &LabelRates::tp_rate}, {"TN", &LabelRates::tn_rate}, {"FP", &LabelRates::fp_rate},
         {"FN", &LabelRates::fn_rate}}};
    for (const auto& [name, member] : kinds) {
      std::vector<std::string> row{c.key.language, c.key.representation, c.key.classifier, on_off(c.key.pca), name};
      for (const auto& l : c.rates->labels) row.push_back(format_rate(l.*member));
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

TextTable train_test_time_table(const ReportTable& t, const ExperimentConfig& c) {
  TextTable out{"Train and test time in seconds", {"representation", "pca", "language"}, {}};
  for (const auto& clf : c.classifiers) {
    out.header.push_back(clf.name + " train");
    out.header.push_back(clf.name + " test");
  }
  for (const auto& rep : c.representations)
    for (bool pca : c.pca)
      for (const auto& lang : c.languages) {
        std::vector<std::string> row{rep.name, on_off(pca), lang};
        for (const auto& clf : c.classifiers) {
          const CellKey key{lang, rep.name, clf.name, pca};
          row.push_back(lookup(t, key, train_text));
          row.push_back(lookup(t, key, predict_text));
        }
        out.rows.push_back(std::move(row));
      }
  return out;
}

TextTable all_scores_table(const ReportTable& t, const ExperimentConfig& c) {
  TextTable out{"F1-macro for every representation and classifier", {"pca", "language"}, {}};
  for (const auto& rep : c.representations)
    for (const auto& clf : c.classifiers) out.header.push_back(rep.name + "/" + clf.name);
  for (bool pca : c.pca)
    for (const auto& lang : c.languages) {
      std::vector<std::string> row{on_off(pca), lang};
      for (const auto& rep : c.representations)
        for (const auto& clf : c.classifiers) row.push_back(lookup(t, {lang, rep.name, clf.name, pca}, f1_text));
      out.rows.push_back(std::move(row));
    }
  return out;
}

TextTable ablation_f1_table(const ReportTable& t, const ExperimentConfig& c) {
  return with_deltas(t, c, "Ablation: F1-macro with and without PCA", f1_exact, f1_value, exact_number);
}

TextTable ablation_train_time_table(const ReportTable& t, const ExperimentConfig& c) {
  return with_deltas(t, c, "Ablation: training time in seconds with and without PCA", train_exact, train_value,
                     exact_number);
}

void write_reports(const ReportTable& t, const ExperimentConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const TextTable by_rep = representation_table(t, c);
  const TextTable by_clf = classifier_table(t, c);
  const TextTable pca_f1 = pca_f1_table(t, c);
  const TextTable confusion = confusion_report(t);
  const TextTable all = all_scores_table(t, c);
  const TextTable pca_time = pca_train_time_table(t, c);
  const TextTable times = train_test_time_table(t, c);
  const TextTable timing = timing_report(t);

  write_csv_file(master_report(t), dir / "report.csv");
  write_csv_file(by_rep, dir / "f1_by_representation.csv");
  write_csv_file(by_clf, dir / "f1_by_classifier.csv");
  write_csv_file(pca_f1, dir / "f1_pca.csv");
  write_csv_file(confusion, dir / "confusion_rates.csv");
  write_csv_file(all, dir / "f1_all.csv");
  write_text_file({by_rep, by_clf, pca_f1, all, confusion}, dir / "tables.txt");

  write_csv_file(timing, dir / "timings.csv");
  write_csv_file(pca_time, dir / "train_time_pca.csv");
  write_csv_file(times, dir / "train_test_time.csv");
  write_text_file({pca_time, times}, dir / "timing_tables.txt");
}

void write_ablation_reports(const ReportTable& t, const ExperimentConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const TextTable f1 = ablation_f1_table(t, c);
  const TextTable time = ablation_train_time_table(t, c);
  write_csv_file(f1, dir / "ablation_f1.csv");
  write_csv_file(time, dir / "ablation_train_time.csv");
  write_text_file({with_deltas(t, c, f1.title, f1_text, f1_value, [](double d) { return fmt::format("{:+.4f}", d); })},
                  dir / "ablation.txt");
  write_text_file(
      {with_deltas(t, c, time.title, train_text, train_value, [](double d) { return fmt::format("{:+.4f}", d); })},
      dir / "ablation_timing.txt");
}

}  // namespace emo
