// Command-line front end: experiment matrices, ablation, prediction, inspection.
#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "emo/corpus.hpp"
#include "emo/dense_features.hpp"
#include "emo/error.hpp"
#include "emo/runner/config.hpp"
#include "emo/runner/report.hpp"
#include "emo/runner/runner.hpp"
#include "emo/sparse_features.hpp"
#include "emo/synthetic.hpp"
#include "emo/tokenize.hpp"

namespace {

constexpr int kExitCellFailed = 1;
constexpr int kExitUsage = 2;

struct MatrixFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
  bool resume = false;
};

void add_matrix_flags(CLI::App* cmd, MatrixFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--out", f.out, "Override the output directory");
  cmd->add_option("--workers", f.workers, "Concurrent cells")->check(CLI::PositiveNumber);
  cmd->add_flag("--resume", f.resume, "Skip cells whose results already exist in the output directory");
}

emo::ExperimentConfig configure(const MatrixFlags& f) {
  emo::ExperimentConfig cfg = emo::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.output_dir = *f.out;
  if (f.workers) cfg.workers = *f.workers;
  return cfg;
}

int summarize(const emo::ReportTable& table, const emo::ExperimentConfig& cfg) {
  const auto failed = std::count_if(table.rows.begin(), table.rows.end(), [](const auto& c) { return !c.ok; });
  emo::pca_f1_table(table, cfg).write_text(std::cout);
  fmt::print("\n{} cells, {} failed; reports in {}\n", table.rows.size(), failed, cfg.output_dir.string());
  return failed ? kExitCellFailed : 0;
}

emo::TokenizerSpec tokenizer_from(const std::string& kind, const std::string& vocab, bool keep_case) {
  emo::TokenizerSpec spec;
  spec.kind = emo::parse_tokenizer_kind(kind);
  spec.lowercase = !keep_case;
  if (!vocab.empty()) spec.vocab_path = vocab;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label emotion detection experiments"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  MatrixFlags run_flags, ablate_flags, verify_flags;
  auto* run = app.add_subcommand("run", "Run the experiment matrix and write reports");
  add_matrix_flags(run, run_flags);
  auto* ablate = app.add_subcommand("ablate", "Paired runs with and without PCA (single worker)");
  add_matrix_flags(ablate, ablate_flags);
  auto* verify = app.add_subcommand("verify", "Recompute reported F1 values from saved predictions");
  verify->add_option("--config", verify_flags.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  verify->add_option("--out", verify_flags.out, "Override the output directory");

  std::string model, input, output, embeddings;
  auto* predict = app.add_subcommand("predict", "Label an id,text CSV with a saved pipeline");
  predict->add_option("--model", model, "Saved pipeline (.emo)")->required()->check(CLI::ExistingFile);
  predict->add_option("--input", input, "CSV with id and text columns")->required()->check(CLI::ExistingFile);
  predict->add_option("--output", output, "Where to write predictions")->required();
  predict->add_option("--embeddings", embeddings, "Embedding file for precomputed-embedding pipelines");

  auto* inspect = app.add_subcommand("inspect", "Dataset, vocabulary and embedding statistics");
  inspect->require_subcommand(1);
  std::string data_path, language, tokenizer_kind = "unicode-words", tokenizer_vocab, vectors_path, vocab_out;
  bool keep_case = false;
  std::size_t top = 20, max_words = 0;
  auto* inspect_data = inspect->add_subcommand("data", "Split size and label balance");
  inspect_data->add_option("--input", data_path, "Split CSV")->required()->check(CLI::ExistingFile);
  inspect_data->add_option("--language", language, "Language code, checked against published split sizes");
  auto* inspect_vocab = inspect->add_subcommand("vocab", "Vocabulary fitted on a split");
  inspect_vocab->add_option("--input", data_path, "Split CSV")->required()->check(CLI::ExistingFile);
  inspect_vocab->add_option("--tokenizer", tokenizer_kind, "unicode-words, whitespace or external-vocab");
  inspect_vocab->add_option("--vocab", tokenizer_vocab, "Subword list for external-vocab")->check(CLI::ExistingFile);
  inspect_vocab->add_flag("--keep-case", keep_case, "Disable case folding");
  inspect_vocab->add_option("--top", top, "Most frequent tokens to list");
  inspect_vocab->add_option("--write", vocab_out, "Write token<TAB>document-frequency lines here");
  auto* inspect_vectors = inspect->add_subcommand("vectors", "Word-vector table and coverage of a split");
  inspect_vectors->add_option("--vectors", vectors_path, "Word-vector text file")->required()->check(CLI::ExistingFile);
  inspect_vectors->add_option("--input", data_path, "Split CSV to measure coverage on")->check(CLI::ExistingFile);
  inspect_vectors->add_option("--tokenizer", tokenizer_kind, "unicode-words, whitespace or external-vocab");
  inspect_vectors->add_option("--vocab", tokenizer_vocab, "Subword list for external-vocab")->check(CLI::ExistingFile);
  inspect_vectors->add_option("--max-words", max_words, "Read at most this many vectors (0 = all)");

  emo::SyntheticConfig synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate the synthetic six-cluster corpus");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_cfg.seed, "Generator seed");
  synth->add_option("--language", synth_cfg.language, "Language code used for file names and ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_pattern("%H:%M:%S %^%l%$ %v");

  try {
    if (*run) {
      const auto cfg = configure(run_flags);
      return summarize(emo::run_matrix(cfg, {run_flags.resume, nullptr}), cfg);
    }
    if (*ablate) {
      auto cfg = configure(ablate_flags);
      const auto table = emo::run_ablation(cfg, {ablate_flags.resume, nullptr});
      cfg.pca = {false, true};
      std::ifstream text(cfg.output_dir / "ablation.txt");
      std::cout << text.rdbuf();
      return summarize(table, cfg);
    }
    if (*verify) {
      const auto cfg = configure(verify_flags);
      const auto result = emo::verify_outputs(cfg);
      for (const auto& m : result.mismatches) fmt::print("MISMATCH {}\n", m);
      fmt::print("{} F1 values checked, {} mismatches\n", result.checked, result.mismatches.size());
      return result.mismatches.empty() ? 0 : kExitCellFailed;
    }
    if (*predict) {
      emo::predict_file(model, input, output,
                        embeddings.empty() ? std::nullopt : std::optional<std::filesystem::path>(embeddings));
      fmt::print("wrote {}\n", output);
      return 0;
    }
    if (*inspect_data) {
      const auto split = emo::load_split(data_path, emo::SplitRole::train, language);
      fmt::print("{}: {} documents, labeled: {}\n", data_path, split.size(), split.labeled() ? "yes" : "no");
      if (split.labeled()) {
        const auto stats = emo::summarize(split);
        fmt::print("{:<10} {:>9} {:>9} {:>8}\n", "label", "positive", "negative", "pos%");
        for (std::size_t j = 0; j < emo::kNumEmotions; ++j) {
          fmt::print("{:<10} {:>9} {:>9} {:>7.2f}%\n", emo::kEmotionNames[j], stats[j].positives, stats[j].negatives,
                     100.0 * stats[j].positive_fraction);
        }
      }
      if (!language.empty()) {
        if (const auto* d = emo::find_declared_sizes(language)) {
          fmt::print("published sizes for {}: train {}, dev {}, test {}\n", d->name, d->train, d->dev, d->test);
        } else {
          fmt::print("no published sizes for '{}'\n", language);
        }
      }
      return 0;
    }
    if (*inspect_vocab) {
      const auto split = emo::load_split(data_path, emo::SplitRole::train);
      const emo::Tokenizer tok(tokenizer_from(tokenizer_kind, tokenizer_vocab, keep_case));
      std::vector<emo::TokenSequence> docs;
      for (const auto& d : split.documents) docs.push_back(tok.tokenize(d.text, d.id));
      const auto vocab = emo::fit_bow(docs);
      fmt::print("{} documents, {} distinct tokens\n", vocab.corpus_size(), vocab.size());
      std::vector<std::size_t> order(vocab.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return vocab.document_frequency(a) > vocab.document_frequency(b);
      });
      for (std::size_t i = 0; i < std::min(top, order.size()); ++i) {
        fmt::print("{:>6}  {}\n", vocab.document_frequency(order[i]), vocab.tokens()[order[i]]);
      }
      if (!vocab_out.empty()) {
        std::ofstream out(vocab_out, std::ios::binary);
        if (!out) throw emo::Error("cannot write " + vocab_out);
        vocab.write_text(out);
      }
      return 0;
    }
    if (*inspect_vectors) {
      const auto table = emo::load_word_vectors(vectors_path, {}, max_words);
      fmt::print("{}: {} vectors, dimension {}\n", vectors_path, table.size(), table.dimension());
      if (!data_path.empty()) {
        const auto split = emo::load_split(data_path, emo::SplitRole::train);
        const emo::Tokenizer tok(tokenizer_from(tokenizer_kind, tokenizer_vocab, false));
        std::vector<emo::TokenSequence> docs;
        for (const auto& d : split.documents) docs.push_back(tok.tokenize(d.text, d.id));
        const auto pooled = emo::embed_documents(docs, table);
        const auto& oov = pooled.oov;
        fmt::print("tokens: {}, out of vocabulary: {} ({:.2f}%)\n", oov.tokens, oov.oov_tokens,
                   oov.tokens ? 100.0 * static_cast<double>(oov.oov_tokens) / static_cast<double>(oov.tokens) : 0.0);
        fmt::print("documents: {}, with no known token: {}\n", oov.documents, oov.fully_oov_documents);
      }
      return 0;
    }
    if (*synth) {
      const auto corpus = emo::make_synthetic_corpus(synth_cfg);
      emo::write_synthetic_corpus(corpus, synth_cfg, synth_out);
      fmt::print("wrote {} train / {} dev / {} test documents to {}\n", corpus.train.size(), corpus.dev.size(),
                 corpus.test.size(), synth_out);
      return 0;
    }
  } catch (const emo::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitCellFailed;
  }
  return 0;
}
