#include "emo/runner/runner.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "emo/corpus.hpp"
#include "emo/csv.hpp"
#include "emo/error.hpp"
#include "emo/learn/grid_search.hpp"
#include "emo/runner/pipeline.hpp"
#include "emo/runner/report.hpp"

namespace emo {
namespace {

using nlohmann::json;

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                      c == '_' || c == '-';
    out += keep ? c : '-';
  }
  return out;
}

template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct LanguageData {
  std::optional<DatasetSplit> train, dev, test;
  std::string error;
};

// Representation built once per (language, representation) and shared by its cells.
struct Group {
  std::size_t language = 0;
  std::size_t representation = 0;
  std::optional<FittedRepresentation> fitted;
  FeatureMatrix train, dev, test;
  double seconds = 0.0;
  std::string resolved_language;
  std::string resolution;
  std::string error;
};

json rates_to_json(const ConfusionRates& r) {
  json labels = json::array();
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  for (const auto& l : r.labels) labels.push_back({opt(l.tp_rate), opt(l.tn_rate), opt(l.fp_rate), opt(l.fn_rate)});
  return labels;
}

ConfusionRates rates_from_json(const json& j) {
  ConfusionRates r;
  auto opt = [](const json& v) { return v.is_null() ? std::optional<double>() : std::optional<double>(v.get<double>()); };
  for (const auto& l : j) r.labels.push_back({opt(l.at(0)), opt(l.at(1)), opt(l.at(2)), opt(l.at(3))});
  return r;
}

json cell_to_json(const CellResult& c) {
  json j;
  j["language"] = c.key.language;
  j["representation"] = c.key.representation;
  j["classifier"] = c.key.classifier;
  j["pca"] = c.key.pca;
  j["ok"] = c.ok;
  j["error"] = c.error;
  j["f1_macro"] = c.f1_macro ? json(*c.f1_macro) : json(nullptr);
  j["dev_f1_macro"] = c.dev_f1_macro ? json(*c.dev_f1_macro) : json(nullptr);
  j["rates"] = c.rates ? rates_to_json(*c.rates) : json(nullptr);
  j["timing"] = {c.timing.representation_seconds, c.timing.train_seconds, c.timing.predict_seconds};
  j["sizes"] = {c.n_train, c.n_dev, c.n_test, c.input_dim, c.feature_dim};
  j["resolved_language"] = c.resolved_language;
  j["resolution"] = c.resolution;
  j["model"] = c.model;
  return j;
}

CellResult cell_from_json(const json& j) {
  CellResult c;
  c.key = {j.at("language"), j.at("representation"), j.at("classifier"), j.at("pca")};
  c.ok = j.at("ok");
  c.error = j.at("error");
  if (!j.at("f1_macro").is_null()) c.f1_macro = j.at("f1_macro").get<double>();
  if (!j.at("dev_f1_macro").is_null()) c.dev_f1_macro = j.at("dev_f1_macro").get<double>();
  if (!j.at("rates").is_null()) c.rates = rates_from_json(j.at("rates"));
  const auto& t = j.at("timing");
  c.timing = {t.at(0), t.at(1), t.at(2)};
  const auto& s = j.at("sizes");
  c.n_train = s.at(0);
  c.n_dev = s.at(1);
  c.n_test = s.at(2);
  c.input_dim = s.at(3);
  c.feature_dim = s.at(4);
  c.resolved_language = j.at("resolved_language");
  c.resolution = j.at("resolution");
  c.model = j.at("model");
  return c;
}

std::filesystem::path cell_file(const std::filesystem::path& out, const CellKey& key) {
  return out / "cells" / (key.id() + ".json");
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

void write_predictions(const std::filesystem::path& path, const std::vector<std::string>& ids, const LabelMatrix& y) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  std::vector<std::string> header{"id"};
  header.insert(header.end(), kEmotionNames.begin(), kEmotionNames.end());
  csv::write_row(out, header);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::string> row{ids[i]};
    for (std::size_t j = 0; j < y.cols(); ++j) row.push_back(y(i, j) ? "1" : "0");
    csv::write_row(out, row);
  }
  if (!out) throw Error("write failed: " + path.string());
}

// Reads a predictions file back as a labeled split (ids plus six bits).
DatasetSplit read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  csv::Reader reader(in);
  auto header = reader.next();
  std::vector<std::string> expected{"id"};
  expected.insert(expected.end(), kEmotionNames.begin(), kEmotionNames.end());
  if (!header || header->fields != expected) throw SchemaError(path.string() + ": unexpected prediction header");
  DatasetSplit split;
  while (auto rec = reader.next()) {
    if (rec->fields.size() != expected.size()) {
      throw ParseError(fmt::format("{}:{}: expected {} fields", path.string(), rec->line, expected.size()));
    }
    EmotionLabels labels;
    for (std::size_t j = 0; j < kNumEmotions; ++j) {
      const auto& f = rec->fields[j + 1];
      if (f != "0" && f != "1") throw ParseError(fmt::format("{}:{}: non-binary cell", path.string(), rec->line));
      labels[j] = f == "1";
    }
    split.documents.push_back({rec->fields[0], "", labels});
  }
  return split;
}

std::vector<SupportedLanguage> supported_languages(const RepresentationSpec& rep, const FallbackPolicy& base) {
  std::vector<SupportedLanguage> out;
  for (const auto& [code, path] : rep.sources) {
    std::string name = code;
    if (auto it = base.language_names.find(code); it != base.language_names.end()) {
      name = it->second;
    } else if (const auto* d = find_declared_sizes(code)) {
      name = std::string(d->name);
    }
    out.push_back({code, name});
  }
  return out;
}

class MatrixRun {
 public:
  MatrixRun(const ExperimentConfig& cfg, const RunOptions& opt) : cfg_(cfg), opt_(opt) {}

  ReportTable run() {
    cfg_.validate();
    std::filesystem::create_directories(cfg_.output_dir / "cells");
    std::filesystem::create_directories(cfg_.output_dir / "predictions");
    if (cfg_.save_models) std::filesystem::create_directories(cfg_.output_dir / "models");

    // Cell list in report order; resumable cells are loaded instead of run.
    std::vector<CellResult> rows;
    std::vector<std::size_t> pending;
    for (std::size_t l = 0; l < cfg_.languages.size(); ++l)
      for (const auto& rep : cfg_.representations)
        for (bool pca : cfg_.pca)
          for (const auto& clf : cfg_.classifiers) {
            CellResult cell;
            cell.key = {cfg_.languages[l], rep.name, clf.name, pca};
            if (opt_.resume && try_resume(cell)) {
              rows.push_back(std::move(cell));
              continue;
            }
            pending.push_back(rows.size());
            rows.push_back(std::move(cell));
          }

    if (!pending.empty()) {
      load_languages(pending, rows);
      build_groups(pending, rows);
      std::atomic<std::size_t> done{0};
      parallel_for(pending.size(), cfg_.workers, [&](std::size_t i) {
        CellResult& cell = rows[pending[i]];
        run_cell(cell);
        write_text_file(cell_file(cfg_.output_dir, cell.key), cell_to_json(cell).dump(2) + "\n");
        const auto n = ++done;
        if (cell.ok) {
          spdlog::info("[{}/{}] {} f1={}", n, pending.size(), cell.key.id(),
                       cell.f1_macro ? fmt::format("{:.4f}", *cell.f1_macro) : "n/a");
        } else {
          spdlog::error("[{}/{}] {} failed: {}", n, pending.size(), cell.key.id(), cell.error);
        }
      });
    }
    ReportTable table{std::move(rows)};
    write_reports(table, cfg_, cfg_.output_dir);
    return table;
  }

 private:
  bool try_resume(CellResult& cell) const {
    const auto path = cell_file(cfg_.output_dir, cell.key);
    if (!std::filesystem::exists(path) || !std::filesystem::exists(cell_prediction_path(cfg_.output_dir, cell.key))) {
      return false;
    }
    try {
      std::ifstream in(path);
      CellResult loaded = cell_from_json(json::parse(in));
      if (!loaded.ok || !(loaded.key == cell.key)) return false;
      loaded.resumed = true;
      cell = std::move(loaded);
      return true;
    } catch (const std::exception& e) {
      spdlog::warn("ignoring unreadable cell file {}: {}", path.string(), e.what());
      return false;
    }
  }

  std::size_t language_index(const std::string& code) const {
    return static_cast<std::size_t>(std::find(cfg_.languages.begin(), cfg_.languages.end(), code) -
                                    cfg_.languages.begin());
  }

  std::size_t representation_index(const std::string& name) const {
    for (std::size_t i = 0; i < cfg_.representations.size(); ++i)
      if (cfg_.representations[i].name == name) return i;
    throw Error("unknown representation " + name);
  }

  void load_languages(const std::vector<std::size_t>& pending, const std::vector<CellResult>& rows) {
    data_.resize(cfg_.languages.size());
    std::vector<bool> needed(cfg_.languages.size(), false);
    for (auto i : pending) needed[language_index(rows[i].key.language)] = true;
    for (std::size_t l = 0; l < cfg_.languages.size(); ++l) {
      if (!needed[l]) continue;
      const auto& lang = cfg_.languages[l];
      try {
        data_[l].train = load_split(cfg_.split_path(lang, SplitRole::train), SplitRole::train, lang);
        data_[l].train->label_matrix();
        if (const auto dev = cfg_.split_path(lang, SplitRole::dev); std::filesystem::exists(dev)) {
          data_[l].dev = load_split(dev, SplitRole::dev, lang);
        }
        data_[l].test = load_split(cfg_.split_path(lang, SplitRole::test), SplitRole::test, lang);
        if (const auto* declared = find_declared_sizes(lang)) {
          if (data_[l].train->size() != declared->train) {
            spdlog::warn("{}: train split has {} rows, the published count is {}", lang, data_[l].train->size(),
                         declared->train);
          }
        }
      } catch (const std::exception& e) {
        data_[l].error = e.what();
      }
    }
  }

  void build_groups(const std::vector<std::size_t>& pending, const std::vector<CellResult>& rows) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
    for (auto i : pending) {
      const auto k = std::make_pair(language_index(rows[i].key.language), representation_index(rows[i].key.representation));
      if (index.emplace(k, groups_.size()).second) {
        Group g;
        g.language = k.first;
        g.representation = k.second;
        groups_.push_back(std::move(g));
      }
    }
    group_of_ = std::move(index);

    // Resolution and vector loading run serially: they may hit the network and
    // the shared resolution cache.
    std::map<std::filesystem::path, std::shared_ptr<const EmbeddingTable>> tables;
    std::map<std::size_t, std::shared_ptr<LanguageResolver>> resolvers;
    for (auto& g : groups_) {
      const auto& rep = cfg_.representations[g.representation];
      const auto& lang = cfg_.languages[g.language];
      if (!data_[g.language].error.empty()) {
        g.error = data_[g.language].error;
        continue;
      }
      if (!rep.dense()) continue;
      try {
        auto& resolver = resolvers[g.representation];
        if (!resolver) {
          FallbackPolicy policy = cfg_.fallback;
          policy.supported = supported_languages(rep, cfg_.fallback);
          // Static targets outside this representation's languages are not usable here.
          for (auto it = policy.static_map.begin(); it != policy.static_map.end();) {
            it = policy.is_supported(it->second) ? std::next(it) : policy.static_map.erase(it);
          }
          resolver = std::make_shared<LanguageResolver>(std::move(policy), opt_.transport);
        }
        const auto res = resolver->resolve(lang);
        g.resolved_language = res.code;
        g.resolution = std::string(to_string(res.provenance));
        if (res.provenance != Provenance::native) {
          spdlog::info("{} / {}: using {} resources ({})", lang, rep.name, res.code, g.resolution);
        }
        if (rep.kind == RepresentationKind::word_vectors) {
          const auto& path = rep.sources.at(res.code);
          auto& table = tables[path];
          if (!table) {
            spdlog::info("loading word vectors {}", path.string());
            table = std::make_shared<const EmbeddingTable>(load_word_vectors(path, res.code, rep.max_words));
          }
        }
      } catch (const std::exception& e) {
        g.error = e.what();
      }
    }

    parallel_for(groups_.size(), cfg_.workers, [&](std::size_t gi) {
      Group& g = groups_[gi];
      if (!g.error.empty()) return;
      const auto& rep = cfg_.representations[g.representation];
      const auto& d = data_[g.language];
      try {
        std::filesystem::path source;
        std::shared_ptr<const EmbeddingTable> table;
        if (rep.dense()) {
          source = rep.sources.at(g.resolved_language);
          if (auto it = tables.find(source); it != tables.end()) table = it->second;
        }
        g.seconds = time_run([&] {
          g.fitted = FittedRepresentation::fit(rep, *d.train, g.resolved_language, source, table);
          g.train = g.fitted->transform(*d.train);
          if (d.dev) g.dev = g.fitted->transform(*d.dev);
          g.test = g.fitted->transform(*d.test);
        });
      } catch (const std::exception& e) {
        g.error = e.what();
      }
    });
  }

  void run_cell(CellResult& cell) {
    try {
      const Group& g = groups_[group_of_.at({language_index(cell.key.language),
                                             representation_index(cell.key.representation)})];
      cell.resolved_language = g.resolved_language;
      cell.resolution = g.resolution;
      if (!g.error.empty()) throw Error(g.error);
      const LanguageData& d = data_[g.language];
      const auto& entry = *std::find_if(cfg_.classifiers.begin(), cfg_.classifiers.end(),
                                        [&](const ClassifierEntry& c) { return c.name == cell.key.classifier; });
      cell.timing.representation_seconds = g.seconds;
      cell.n_train = d.train->size();
      cell.n_dev = d.dev ? d.dev->size() : 0;
      cell.n_test = d.test->size();
      cell.input_dim = g.train.cols();

      const LabelMatrix y_train = d.train->label_matrix();
      ClassifierSpec spec = entry.spec;
      spec.seed = cfg_.seed;
      std::optional<FittedReduction> reduction;
      std::optional<FittedClassifier> model;

      cell.timing.train_seconds = time_run([&] {
        const FeatureMatrix* x_train = &g.train;
        FeatureMatrix reduced;
        if (cell.key.pca) {
          reduction = FittedReduction::fit(cfg_.reduction, g.train);
          reduced = reduction->apply(g.train);
          x_train = &reduced;
        }
        if (entry.grid) {
          if (!d.dev || d.dev->size() == 0 || !d.dev->labeled()) {
            throw NoLabelsError("grid search needs a labeled dev split (" +
                                cfg_.split_path(cell.key.language, SplitRole::dev).string() + ")");
          }
          const FeatureMatrix x_dev = reduction ? reduction->apply(g.dev) : g.dev;
          auto result = grid_search_mlp(*entry.grid, *x_train, y_train, x_dev, d.dev->label_matrix(), spec.seed,
                                        spec.params);
          cell.dev_f1_macro = result.best_score;
          model = std::move(result.best_model);
        } else {
          model = fit(spec, *x_train, y_train);
        }
      });
      cell.model = model->spec().describe();
      cell.feature_dim = model->input_dim();

      PredictionMatrix pred;
      cell.timing.predict_seconds = time_run([&] {
        if (reduction) {
          pred = model->predict(reduction->apply(g.test));
        } else {
          pred = model->predict(g.test);
        }
      });

      write_predictions(cell_prediction_path(cfg_.output_dir, cell.key), d.test->ids(), pred.labels);
      if (d.test->size() > 0 && d.test->labeled()) {
        const LabelMatrix gold = d.test->label_matrix();
        cell.f1_macro = f1_macro(gold, pred.labels);
        cell.rates = confusion_rates(gold, pred.labels);
      }
      if (cfg_.save_models) {
        PipelineModel(*g.fitted, reduction, *model).save(cell_model_path(cfg_.output_dir, cell.key));
      }
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  }

  const ExperimentConfig& cfg_;
  const RunOptions& opt_;
  std::vector<LanguageData> data_;
  std::vector<Group> groups_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> group_of_;
};

}  // namespace

std::string CellKey::id() const {
  return fmt::format("{}__{}__{}__{}", sanitize(language), sanitize(representation), sanitize(classifier),
                     pca ? "pca" : "nopca");
}

bool ReportTable::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const CellResult& c) { return c.ok; });
}

const CellResult* ReportTable::find(const CellKey& key) const {
  for (const auto& r : rows)
    if (r.key == key) return &r;
  return nullptr;
}

std::filesystem::path cell_prediction_path(const std::filesystem::path& out_dir, const CellKey& key) {
  return out_dir / "predictions" / (key.id() + ".csv");
}

std::filesystem::path cell_model_path(const std::filesystem::path& out_dir, const CellKey& key) {
  return out_dir / "models" / (key.id() + ".emo");
}

ReportTable run_matrix(const ExperimentConfig& config, const RunOptions& options) {
  return MatrixRun(config, options).run();
}

ReportTable run_ablation(ExperimentConfig config, const RunOptions& options) {
  config.pca = {false, true};
  if (config.workers != 1) spdlog::info("ablation: timing run, using a single worker");
  config.workers = 1;
  ReportTable table = run_matrix(config, options);
  write_ablation_reports(table, config, config.output_dir);
  return table;
}

void predict_file(const std::filesystem::path& model_path, const std::filesystem::path& input,
                  const std::filesystem::path& output, const std::optional<std::filesystem::path>& embeddings) {
  PipelineModel model = PipelineModel::load(model_path);
  if (model.representation().kind() == RepresentationKind::precomputed) {
    if (!embeddings) throw ConfigError("this model reads precomputed embeddings; pass the file holding the input rows");
    model.representation().set_source(*embeddings);
  }
  const DatasetSplit split = load_split(input, SplitRole::test);
  const PredictionMatrix pred = model.predict(split);
  if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
  write_predictions(output, split.ids(), pred.labels);
}

VerifyResult verify_outputs(const ExperimentConfig& config) {
  const auto report_path = config.output_dir / "report.csv";
  std::ifstream in(report_path, std::ios::binary);
  if (!in) throw Error("cannot read " + report_path.string());
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw SchemaError(report_path.string() + ": empty report");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header->fields.size(); ++i) col[header->fields[i]] = i;
  for (const char* name : {"language", "representation", "classifier", "pca", "status", "f1_macro"}) {
    if (!col.count(name)) throw SchemaError(report_path.string() + ": missing column " + name);
  }

  VerifyResult result;
  std::map<std::string, DatasetSplit> gold;
  while (auto rec = reader.next()) {
    const auto& f = rec->fields;
    if (f.at(col["status"]) != "ok" || f.at(col["f1_macro"]) == "n/a") continue;
    const CellKey key{f.at(col["language"]), f.at(col["representation"]), f.at(col["classifier"]),
                      f.at(col["pca"]) == "on"};
    const double reported = std::stod(f.at(col["f1_macro"]));
    auto it = gold.find(key.language);
    if (it == gold.end()) {
      it = gold.emplace(key.language,
                        load_split(config.split_path(key.language, SplitRole::test), SplitRole::test, key.language))
               .first;
    }
    const DatasetSplit pred = read_predictions(cell_prediction_path(config.output_dir, key));
    ++result.checked;
    if (pred.ids() != it->second.ids()) {
      result.mismatches.push_back(key.id() + ": prediction ids differ from the test split");
      continue;
    }
    const double recomputed = f1_macro(it->second.label_matrix(), pred.label_matrix());
    if (recomputed != reported || exact_number(recomputed) != f.at(col["f1_macro"])) {
      result.mismatches.push_back(fmt::format("{}: report {} vs recomputed {}", key.id(), f.at(col["f1_macro"]),
                                              exact_number(recomputed)));
    }
  }
  return result;
}

}  // namespace emo
