// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "emo/evaluate.hpp"
#include "emo/feature_matrix.hpp"
#include "emo/language_fallback.hpp"
#include "emo/learn/classifier.hpp"
#include "emo/learn/mlp.hpp"
#include "emo/learn/voting.hpp"
#include "emo/reduce.hpp"
#include "emo/rng.hpp"
#include "emo/runner/config.hpp"
#include "emo/runner/runner.hpp"
#include "emo/sparse_features.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace emo;
using testing_support::read_file;
using testing_support::TempDir;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Records the first few failures; further ones only count.
class Check {
 public:
  void expect(bool condition, const std::string& what) {
    if (condition) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    return {false, fmt::format("{} failure(s): {}", failures_, notes_)};
  }

 private:
  std::size_t failures_ = 0;
  std::string notes_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome tfidf_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  Check check;
  double worst_idf = 0, worst_norm = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 20, vocab = 1 + rng() % 50;
    oracle::Docs raw(n);
    for (auto& d : raw) {
      const std::size_t len = rng() % 15;
      for (std::size_t t = 0; t < len; ++t) d.push_back("t" + std::to_string(rng() % vocab));
    }
    if (std::all_of(raw.begin(), raw.end(), [](const auto& d) { return d.empty(); })) raw[0].push_back("t0");
    std::vector<TokenSequence> corpus;
    for (const auto& d : raw) corpus.push_back({d, {}});

    const auto model = fit_tfidf(corpus, true);
    const auto expected = oracle::idf(raw);
    check.expect(model.vocabulary.size() == expected.size(), fmt::format("corpus {}: vocabulary size", trial));
    for (std::size_t c = 0; c < model.vocabulary.size(); ++c) {
      const auto it = expected.find(model.vocabulary.tokens()[c]);
      if (it == expected.end()) {
        check.expect(false, "unexpected token");
        continue;
      }
      const double err = std::abs(model.idf[c] - it->second);
      worst_idf = std::max(worst_idf, err);
      check.expect(err <= 1e-12, fmt::format("corpus {}: idf error {:.3e}", trial, err));
    }
    const auto rows = transform_tfidf(corpus, model);
    const auto oracle_rows = oracle::tfidf(raw, raw, true);
    for (int r = 0; r < rows.rows(); ++r) {
      const double norm = rows.row(r).norm();
      if (oracle_rows[static_cast<std::size_t>(r)].empty()) {
        check.expect(norm == 0.0, "empty row is not zero");
        continue;
      }
      worst_norm = std::max(worst_norm, std::abs(norm - 1.0));
      check.expect(std::abs(norm - 1.0) <= 1e-9, fmt::format("corpus {} row {}: norm {}", trial, r, norm));
    }
  }
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 5.0, fmt::format("runtime {:.2f}s", elapsed));
  return check.outcome(fmt::format("100 corpora, max idf err {:.1e} (tol 1e-12), max |norm-1| {:.1e} (tol 1e-9), {:.2f}s (< 5s)",
                                   worst_idf, worst_norm, elapsed));
}

Outcome pca_correctness() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(202);
  std::normal_distribution<double> g(0.0, 1.0);
  Check check;
  double worst_vec = 0, worst_ortho = 0, worst_recon = 0;
  for (int trial = 0; trial < 50; ++trial) {
    // n > d keeps the covariance full rank, so every component is an
    // eigenvector of a simple, nonzero eigenvalue and is unique up to sign.
    const std::size_t n = 3 + rng() % 10;
    const std::size_t d = 1 + rng() % std::min<std::size_t>(8, n - 1);
    DenseMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    oracle::Matrix rows(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) rows[i][j] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g(rng);

    const auto model = fit_pca(FeatureMatrix(x));
    const auto eig = oracle::jacobi(oracle::covariance(rows));
    check.expect(model.n_components() == d, "component count");
    for (std::size_t k = 0; k < std::min<std::size_t>(model.n_components(), d); ++k) {
      double dot = 0;
      for (std::size_t j = 0; j < d; ++j) dot += model.components(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) * eig.vectors[k][j];
      const double sign = dot < 0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double err = std::abs(model.components(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) - sign * eig.vectors[k][j]);
        worst_vec = std::max(worst_vec, err);
        check.expect(err <= 1e-6, fmt::format("matrix {} component {}: error {:.2e}", trial, k, err));
      }
    }
    const Eigen::MatrixXd gram = model.components * model.components.transpose();
    const double ortho = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    worst_ortho = std::max(worst_ortho, ortho);
    check.expect(ortho <= 1e-8, fmt::format("matrix {}: orthonormality {:.2e}", trial, ortho));

    const auto back = inverse_transform_centered(transform_pca(FeatureMatrix(x), model), model);
    const DenseMatrix centered = x.rowwise() - model.mean.transpose();
    const double recon = (back - centered).cwiseAbs().maxCoeff();
    worst_recon = std::max(worst_recon, recon);
    check.expect(recon < 1e-8, fmt::format("matrix {}: reconstruction {:.2e}", trial, recon));
  }

  DenseMatrix four(4, 2);
  four << 2, 0, -2, 0, 0, 1, 0, -1;
  const auto m = fit_pca(FeatureMatrix(four));
  const bool ratios = m.n_components() == 2 && std::abs(m.explained_variance_ratio(0) - 0.8) <= 1e-9 &&
                      std::abs(m.explained_variance_ratio(1) - 0.2) <= 1e-9;
  check.expect(ratios, "4-point variance ratios");

  const double elapsed = seconds_since(start);
  check.expect(elapsed < 5.0, fmt::format("runtime {:.2f}s", elapsed));
  return check.outcome(fmt::format(
      "50 matrices, component err {:.1e} (tol 1e-6), orthonormality {:.1e} (tol 1e-8), reconstruction {:.1e} (< 1e-8), "
      "4-point ratios ({:.12f}, {:.12f}) (tol 1e-9), {:.2f}s (< 5s)",
      worst_vec, worst_ortho, worst_recon, m.explained_variance_ratio(0), m.explained_variance_ratio(1), elapsed));
}

Outcome mlp_gradient_check() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g(0.0, 1.0);
  Check check;
  double worst_lib = 0, worst_oracle = 0;
  constexpr double eps = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng() % 5, d = 1 + rng() % 5, labels = 1 + rng() % 6;
    std::vector<std::size_t> hidden(1 + rng() % 2);
    for (auto& h : hidden) h = 2 + rng() % 6;
    DenseMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    oracle::Matrix rows(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) rows[i][j] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g(rng);
    const auto y = oracle::random_labels(n, labels, rng, 0.5);

    // Every parameter random, biases included: freshly initialized networks
    // have zero biases, which puts units of deeper layers exactly on the ReLU
    // kink whenever a row deactivates the whole previous layer.
    MlpNetwork net(d, hidden, labels);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index p = 0; p < net.parameters().size(); ++p) net.parameters()(p) = u(rng);

    const double lib = gradient_check(net, FeatureMatrix(x), y, eps);
    worst_lib = std::max(worst_lib, lib);
    check.expect(lib < 1e-4, fmt::format("network {}: library check {:.2e}", trial, lib));

    // Analytic gradient against finite differences of an independently coded loss.
    Eigen::VectorXd analytic;
    net.loss_and_gradient(FeatureMatrix(x), y, analytic);
    const auto numeric = oracle::mlp_numeric_gradient(net, rows, y, eps);
    for (Eigen::Index p = 0; p < analytic.size(); ++p) {
      const double denom = std::max({std::abs(analytic(p)), std::abs(numeric(p)), 1e-8});
      const double rel = std::abs(analytic(p) - numeric(p)) / denom;
      worst_oracle = std::max(worst_oracle, rel);
      check.expect(rel < 1e-4, fmt::format("network {} param {}: oracle rel err {:.2e}", trial, p, rel));
    }
  }
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 10.0, fmt::format("runtime {:.2f}s", elapsed));
  return check.outcome(fmt::format(
      "10 networks, eps 1e-5, max rel err {:.1e} (library) / {:.1e} (oracle loss), tol 1e-4, {:.2f}s (< 10s)", worst_lib,
      worst_oracle, elapsed));
}

Outcome f1_oracle() {
  std::mt19937_64 rng(404);
  Check check;
  std::size_t zero_division_labels = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t rows = 1 + rng() % 20, cols = 1 + rng() % 6;
    auto gold = oracle::random_labels(rows, cols, rng, 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0);
    auto pred = oracle::random_labels(rows, cols, rng, 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0);
    // Every fourth pair gets a label with no gold and no predicted positives.
    if (trial % 4 == 0) {
      const std::size_t j = rng() % cols;
      for (std::size_t i = 0; i < rows; ++i) gold(i, j) = pred(i, j) = 0;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      bool any = false;
      for (std::size_t i = 0; i < rows; ++i) any = any || gold(i, j) || pred(i, j);
      zero_division_labels += any ? 0 : 1;
    }
    const double got = f1_macro(gold, pred);
    const double want = oracle::to_double(oracle::f1_macro_exact(gold, pred));
    check.expect(got == want, fmt::format("pair {}: {} vs {}", trial, got, want));
  }
  check.expect(zero_division_labels > 0, "no zero-division case generated");
  return check.outcome(fmt::format("1000 pairs, exact equality, {} zero-division labels", zero_division_labels));
}

Outcome voting_invariant() {
  std::mt19937_64 rng(505);
  std::normal_distribution<double> g(0.0, 1.0);
  Check check;
  std::size_t cells = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 6 + rng() % 25, d = 1 + rng() % 5, labels = 1 + rng() % 6;
    DenseMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = g(rng);
    const auto y = oracle::random_labels(n, labels, rng, 0.4);
    DenseMatrix q(10, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < q.rows(); ++i)
      for (Eigen::Index j = 0; j < q.cols(); ++j) q(i, j) = g(rng);

    ClassifierSpec spec = default_voting_spec(rng());
    spec.members[2].params["n_trees"] = std::int64_t{15};
    const auto model = fit(spec, FeatureMatrix(x), y);
    const auto& voting = dynamic_cast<const Voting&>(model.model());
    for (const auto* probe : {&x, &q}) {
      const FeatureMatrix fm(*probe);
      const auto p = model.predict(fm).labels;
      std::vector<LabelMatrix> member_votes;
      for (const auto& m : voting.members()) member_votes.push_back(m.predict(fm).labels);
      for (std::size_t i = 0; i < p.rows(); ++i) {
        for (std::size_t j = 0; j < p.cols(); ++j) {
          std::size_t ones = 0;
          for (const auto& v : member_votes) ones += v(i, j);
          const std::uint8_t majority = 2 * ones > member_votes.size() ? 1 : 0;
          check.expect(p(i, j) == majority, fmt::format("dataset {} cell ({},{})", trial, i, j));
          ++cells;
        }
      }
    }
  }
  return check.outcome(fmt::format("200 datasets, {} prediction cells checked against member majority", cells));
}

// Parses the four-decimal cells of one column of the emitted confusion table.
std::vector<double> table_column(const std::string& table, std::size_t column) {
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string name, cell;
    cells >> name;
    for (std::size_t c = 0; c <= column; ++c) cells >> cell;
    out.push_back(cell == "n/a" ? std::nan("") : std::stod(cell));
  }
  return out;  // TP, TN, FP, FN
}

Outcome confusion_identities() {
  std::mt19937_64 rng(606);
  Check check;
  std::size_t applicable = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t rows = 1 + rng() % 30;
    const auto gold = oracle::random_labels(rows, 6, rng, 0.3);
    const auto pred = oracle::random_labels(rows, 6, rng, 0.3);
    const auto rates = confusion_rates(gold, pred);
    for (const auto& l : rates.labels) {
      if (l.tp_rate) {
        ++applicable;
        check.expect(std::abs(*l.tp_rate + *l.fn_rate - 1.0) <= 1e-12, "tp + fn != 1");
      }
      if (l.tn_rate) {
        ++applicable;
        check.expect(std::abs(*l.tn_rate + *l.fp_rate - 1.0) <= 1e-12, "tn + fp != 1");
      }
      check.expect(l.tp_rate.has_value() == l.fn_rate.has_value() && l.tn_rate.has_value() == l.fp_rate.has_value(),
                   "n/a pattern");
    }
  }

  // A fixture with 16 positive and 84 negative anger samples: 9 true
  // positives and 79 true negatives.
  LabelMatrix gold(100, 6), pred(100, 6);
  for (std::size_t i = 0; i < 100; ++i) {
    gold(i, 0) = i < 16;
    pred(i, 0) = i < 9 || i >= 95;
    for (std::size_t j = 1; j < 6; ++j) gold(i, j) = pred(i, j) = (i + j) % 3 == 0;
  }
  const std::array<std::string_view, kNumEmotions> names = kEmotionNames;
  const auto table = confusion_table(confusion_rates(gold, pred), names);
  const auto anger = table_column(table, 0);
  check.expect(anger.size() == 4, "table rows");
  if (anger.size() == 4) {
    check.expect(anger[0] == 0.5625 && anger[3] == 0.4375, fmt::format("anger TP/FN {} {}", anger[0], anger[3]));
    check.expect(anger[1] == 0.9405 && anger[2] == 0.0595, fmt::format("anger TN/FP {} {}", anger[1], anger[2]));
  }
  for (std::size_t c = 0; c < 6; ++c) {
    const auto col = table_column(table, c);
    check.expect(std::abs(col[0] + col[3] - 1.0) <= 1e-12, fmt::format("column {} TP+FN", c));
    check.expect(std::abs(col[1] + col[2] - 1.0) <= 1e-12, fmt::format("column {} TN+FP", c));
  }
  return check.outcome(fmt::format(
      "{} applicable identities on 500 fixtures (tol 1e-12); emitted anger column {:.4f}+{:.4f}, {:.4f}+{:.4f}", applicable,
      anger[0], anger[3], anger[1], anger[2]));
}

std::filesystem::path source_dir() { return EMO_SOURCE_DIR; }

const CellResult* cell(const ReportTable& t, const std::string& rep, const std::string& clf, bool pca) {
  return t.find({"syn", rep, clf, pca});
}

struct EndToEnd {
  ExperimentConfig config;
  ReportTable table;
  double seconds = 0;
};

EndToEnd run_synthetic(const std::filesystem::path& out) {
  EndToEnd r;
  r.config = load_config(source_dir() / "configs" / "synthetic.json");
  r.config.output_dir = out;
  const auto start = std::chrono::steady_clock::now();
  r.table = run_matrix(r.config);
  r.seconds = seconds_since(start);
  return r;
}

Outcome synthetic_end_to_end(const EndToEnd& run) {
  Check check;
  const auto& cfg = run.config;
  std::size_t samples = 0;
  for (auto role : {SplitRole::train, SplitRole::dev, SplitRole::test})
    samples += load_split(cfg.split_path("syn", role), role).size();
  check.expect(samples == 600, fmt::format("corpus has {} samples", samples));
  check.expect(cfg.representations.size() == 3 && cfg.classifiers.size() == 3 && cfg.pca.size() == 2,
               "matrix is not 3x3x2");
  check.expect(run.table.rows.size() == 18, fmt::format("{} rows", run.table.rows.size()));
  for (const auto& row : run.table.rows) check.expect(row.ok, row.key.id() + ": " + row.error);

  std::string scores;
  for (bool pca : {false, true}) {
    const auto* mlp = cell(run.table, "tfidf", "mlp", pca);
    const auto* dt = cell(run.table, "tfidf", "dt", pca);
    const double mlp_f1 = mlp && mlp->f1_macro ? *mlp->f1_macro : -1;
    const double dt_f1 = dt && dt->f1_macro ? *dt->f1_macro : -1;
    check.expect(mlp_f1 >= 0.90, fmt::format("tfidf+mlp ({}) F1 {:.4f}", pca ? "pca" : "no pca", mlp_f1));
    check.expect(dt_f1 >= 0.70, fmt::format("tfidf+dt ({}) F1 {:.4f}", pca ? "pca" : "no pca", dt_f1));
    scores += fmt::format("{}tfidf+mlp {:.4f}, tfidf+dt {:.4f} ({})", scores.empty() ? "" : "; ", mlp_f1, dt_f1,
                          pca ? "w/ PCA" : "w/o PCA");
  }
  check.expect(run.seconds < 120.0, fmt::format("matrix took {:.1f}s", run.seconds));
  return check.outcome(fmt::format("600 samples, 18 cells; {} (>= 0.90 / >= 0.70); {:.1f}s (< 120s)", scores, run.seconds));
}

Outcome determinism(const EndToEnd& first, const std::filesystem::path& second_out) {
  Check check;
  const auto second = run_synthetic(second_out);
  std::size_t compared = 0;
  for (const char* name : {"report.csv", "f1_by_representation.csv", "f1_by_classifier.csv", "f1_pca.csv",
                           "confusion_rates.csv", "f1_all.csv", "tables.txt"}) {
    check.expect(read_file(first.config.output_dir / name) == read_file(second_out / name), std::string(name) + " differs");
    ++compared;
  }
  std::size_t predictions = 0;
  for (const auto& entry : std::filesystem::directory_iterator(first.config.output_dir / "predictions")) {
    const auto other = second_out / "predictions" / entry.path().filename();
    check.expect(std::filesystem::exists(other) && read_file(entry.path()) == read_file(other),
                 entry.path().filename().string() + " differs");
    ++predictions;
  }
  check.expect(predictions == first.table.rows.size(), fmt::format("{} prediction files", predictions));
  return check.outcome(fmt::format("{} report files and {} prediction files byte-identical across two runs", compared,
                                   predictions));
}

class CountingTransport : public ChatTransport {
 public:
  std::string complete(const LlmBackendConfig&, const std::vector<ChatMessage>& messages) override {
    ++calls;
    prompts.push_back(messages.at(0).content);
    return "Given the family and geography, the closest is Amharic.";
  }
  int calls = 0;
  std::vector<std::string> prompts;
};

Outcome fallback_protocol(const std::filesystem::path& dir) {
  Check check;
  FallbackPolicy policy;
  policy.supported = {{"en", "English"}, {"am", "Amharic"}};
  policy.language_names = {{"om", "Oromo"}};
  policy.llm = LlmBackendConfig{};
  policy.cache_path = dir / "languages.tsv";
  auto transport = std::make_shared<CountingTransport>();

  LanguageResolver first(policy, transport);
  const auto a = first.resolve("om");
  check.expect(a == LanguageResolution{"am", Provenance::llm}, "first resolution is " + a.code);
  check.expect(transport->calls == 1, fmt::format("{} calls on first invocation", transport->calls));
  const auto b = first.resolve("om");
  check.expect(b.code == "am", "second resolution is " + b.code);
  LanguageResolver reloaded(policy, transport);
  const auto c = reloaded.resolve("om");
  check.expect(c.code == "am", "resolution from cache file is " + c.code);
  const int second_calls = transport->calls - 1;
  check.expect(second_calls == 0, fmt::format("{} network calls on later invocations", second_calls));
  check.expect(read_file(*policy.cache_path).find("om") != std::string::npos, "cache file lacks the entry");

  const std::string expected =
      "You are a linguist working on language classification and are familiar with the given languages: "
      "English, Amharic. Please select the language from the list that is most similar to Oromo based on "
      "language family and geographic distance in terms of population distribution.";
  check.expect(!transport->prompts.empty() && transport->prompts[0] == expected, "rendered prompt differs");
  return check.outcome(fmt::format("resolved om -> am via canned reply, cached, {} calls on second invocation, "
                                   "prompt carries both substitutions",
                                   second_calls));
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  TempDir work;
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  std::optional<EndToEnd> synthetic;
  auto synthetic_run = [&]() -> const EndToEnd& {
    if (!synthetic) synthetic = run_synthetic(work / "run-a");
    return *synthetic;
  };

  criteria.emplace_back("tfidf-oracle-equivalence", tfidf_oracle);
  criteria.emplace_back("pca-correctness", pca_correctness);
  criteria.emplace_back("mlp-gradient-check", mlp_gradient_check);
  criteria.emplace_back("f1-macro-oracle", f1_oracle);
  criteria.emplace_back("voting-invariant", voting_invariant);
  criteria.emplace_back("confusion-rate-identities", confusion_identities);
  criteria.emplace_back("synthetic-end-to-end", [&] { return synthetic_end_to_end(synthetic_run()); });
  criteria.emplace_back("determinism", [&] { return determinism(synthetic_run(), work / "run-b"); });
  criteria.emplace_back("fallback-protocol", [&] { return fallback_protocol(work.path()); });

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.ok ? 0 : 1;
    fmt::print("{} {} | {}\n", o.ok ? "PASS" : "FAIL", name, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
