#include "emo/runner/config.hpp"

#include <fmt/format.h>

#include <array>
#include <fstream>
#include <set>

#include "emo/corpus.hpp"
#include "emo/error.hpp"

namespace emo {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 4> kRepresentationNames = {"bow", "tfidf", "word-vectors", "precomputed"};

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

// Walks a JSON object and rejects keys that were never consumed.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return path_ + "." + key; }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) fail(path(key), "is required");
    return j_.at(key);
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string string(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) fail(path(key), "must be a string");
    return v.get<std::string>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : (used_.insert(key), fallback);
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(path(key), "must be true or false");
    return v->get<bool>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback, std::uint64_t min_value = 0) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
      fail(path(key), "must be a non-negative integer");
    }
    const auto x = v->get<std::uint64_t>();
    if (x < min_value) fail(path(key), fmt::format("must be at least {}", min_value));
    return x;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(path(key), "must be a number");
    return v->get<double>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(path(it.key()), "is not a recognized key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

ParamValue parse_param(const json& v, const std::string& path) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::vector<std::int64_t> list;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) fail(fmt::format("{}[{}]", path, i), "list entries must be integers");
      list.push_back(v[i].get<std::int64_t>());
    }
    return list;
  }
  fail(path, "must be a boolean, number, string or list of integers");
}

Hyperparameters parse_params(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "must be an object");
  Hyperparameters out;
  for (auto it = v.begin(); it != v.end(); ++it) out[it.key()] = parse_param(it.value(), path + "." + it.key());
  return out;
}

TokenizerSpec parse_tokenizer(const json& j, const std::string& path, const std::filesystem::path& base) {
  Node n(j, path);
  TokenizerSpec t;
  try {
    t.kind = parse_tokenizer_kind(n.string("kind", "unicode-words"));
  } catch (const ConfigError& e) {
    fail(n.path("kind"), e.what());
  }
  t.lowercase = n.boolean("lowercase", true);
  if (n.has("vocab")) t.vocab_path = resolve(base, n.string("vocab"));
  n.finish();
  try {
    t.validate();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return t;
}

RepresentationSpec parse_representation(const json& j, const std::string& path, const std::filesystem::path& base) {
  Node n(j, path);
  RepresentationSpec r;
  const std::string kind = n.string("kind");
  try {
    r.kind = parse_representation_kind(kind);
  } catch (const ConfigError& e) {
    fail(n.path("kind"), e.what());
  }
  r.name = n.string("name", kind);
  if (const json* t = n.find("tokenizer")) r.tokenizer = parse_tokenizer(*t, n.path("tokenizer"), base);
  if (r.kind == RepresentationKind::tfidf) r.row_normalize = n.boolean("normalize", true);
  if (r.dense()) {
    const std::string key = r.kind == RepresentationKind::word_vectors ? "vectors" : "embeddings";
    const json& src = n.at(key);
    if (!src.is_object() || src.empty()) fail(n.path(key), "must be a non-empty object mapping language to file");
    for (auto it = src.begin(); it != src.end(); ++it) {
      if (!it.value().is_string()) fail(n.path(key) + "." + it.key(), "must be a file path");
      r.sources[it.key()] = resolve(base, it.value().get<std::string>());
    }
    if (r.kind == RepresentationKind::word_vectors) r.max_words = n.unsigned_integer("max_words", 0);
  }
  n.finish();
  return r;
}

ClassifierSpec parse_classifier_spec(Node& n, const std::string& path, std::uint64_t seed) {
  ClassifierSpec spec;
  try {
    spec.kind = parse_classifier_kind(n.string("kind"));
  } catch (const ConfigError& e) {
    fail(n.path("kind"), e.what());
  }
  spec.seed = seed;
  if (const json* p = n.find("params")) spec.params = parse_params(*p, n.path("params"));
  if (const json* m = n.find("members")) {
    if (spec.kind != ClassifierKind::voting) fail(n.path("members"), "only voting takes members");
    if (!m->is_array() || m->empty()) fail(n.path("members"), "must be a non-empty list");
    for (std::size_t i = 0; i < m->size(); ++i) {
      const std::string mp = fmt::format("{}[{}]", n.path("members"), i);
      Node mn((*m)[i], mp);
      spec.members.push_back(parse_classifier_spec(mn, mp, 0));
      mn.finish();
    }
  } else if (spec.kind == ClassifierKind::voting) {
    spec.members = default_voting_spec().members;
  }
  try {
    spec.validate();
  } catch (const HyperparameterError& e) {
    fail(n.path("params") + "." + e.key(), e.detail());
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return spec;
}

HyperGrid parse_grid(const json& g, const std::string& path) {
  if (g.is_string()) {
    if (g.get<std::string>() != "default") fail(path, "must be \"default\" or an object of candidate lists");
    return default_mlp_grid();
  }
  if (!g.is_object() || g.empty()) fail(path, "must be \"default\" or a non-empty object of candidate lists");
  HyperGrid grid;
  for (auto it = g.begin(); it != g.end(); ++it) {
    const std::string kp = path + "." + it.key();
    if (!it.value().is_array() || it.value().empty()) fail(kp, "must be a non-empty list of candidates");
    std::vector<ParamValue> values;
    for (std::size_t i = 0; i < it.value().size(); ++i) values.push_back(parse_param(it.value()[i], fmt::format("{}[{}]", kp, i)));
    grid.add(it.key(), std::move(values));
  }
  return grid;
}

ComponentCount parse_components(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() != "all") fail(path, "must be \"all\", a positive integer, or a fraction in (0, 1]");
    return AllComponents{};
  }
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 1) fail(path, "must be at least 1");
    return FixedComponents{v.get<std::size_t>()};
  }
  if (v.is_number_float()) {
    const double q = v.get<double>();
    if (!(q > 0.0 && q <= 1.0)) fail(path, "fraction must lie in (0, 1]");
    return VarianceFraction{q};
  }
  fail(path, "must be \"all\", a positive integer, or a fraction in (0, 1]");
}

LlmBackendConfig parse_llm(const json& j, const std::string& path) {
  Node n(j, path);
  LlmBackendConfig c;
  c.endpoint = n.string("endpoint", "");
  c.model = n.string("model");
  c.api_key_env = n.string("api_key_env", c.api_key_env);
  c.timeout_seconds = n.number("timeout_seconds", c.timeout_seconds);
  c.prompt_template = n.string("prompt_template", c.prompt_template);
  n.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return c;
}

std::map<std::string, std::string> parse_string_map(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object of strings");
  std::map<std::string, std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) fail(path + "." + it.key(), "must be a string");
    out[it.key()] = it.value().get<std::string>();
  }
  return out;
}

}  // namespace

std::string_view to_string(RepresentationKind kind) { return kRepresentationNames[static_cast<std::size_t>(kind)]; }

RepresentationKind parse_representation_kind(std::string_view name) {
  for (std::size_t i = 0; i < kRepresentationNames.size(); ++i) {
    if (kRepresentationNames[i] == name) return static_cast<RepresentationKind>(i);
  }
  throw ConfigError(fmt::format("unknown representation '{}' (expected bow, tfidf, word-vectors or precomputed)", name));
}

std::filesystem::path ExperimentConfig::split_path(const std::string& language, SplitRole role) const {
  return data_dir / language / (std::string(to_string(role)) + ".csv");
}

void ExperimentConfig::validate() const {
  if (languages.empty()) throw ConfigError("$.languages: at least one language is required");
  if (representations.empty()) throw ConfigError("$.representations: at least one representation is required");
  if (classifiers.empty()) throw ConfigError("$.classifiers: at least one classifier is required");
  if (pca.empty()) throw ConfigError("$.pca: at least one value is required");
  if (workers == 0) throw ConfigError("$.workers: must be at least 1");
  reduction.validate();
  if (!std::filesystem::is_directory(data_dir)) {
    throw ConfigError("$.data_dir: directory not found: " + data_dir.string());
  }
  for (std::size_t i = 0; i < languages.size(); ++i) {
    for (auto role : {SplitRole::train, SplitRole::test}) {
      const auto p = split_path(languages[i], role);
      if (!std::filesystem::is_regular_file(p)) {
        throw ConfigError(fmt::format("$.languages[{}]: missing {} split {}", i, to_string(role), p.string()));
      }
    }
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < representations.size(); ++i) {
    const auto& r = representations[i];
    if (!names.insert("r:" + r.name).second) {
      throw ConfigError(fmt::format("$.representations[{}].name: duplicate name '{}'", i, r.name));
    }
    if (r.tokenizer.vocab_path && !std::filesystem::is_regular_file(*r.tokenizer.vocab_path)) {
      throw ConfigError(
          fmt::format("$.representations[{}].tokenizer.vocab: file not found: {}", i, r.tokenizer.vocab_path->string()));
    }
    for (const auto& [lang, path] : r.sources) {
      if (!std::filesystem::is_regular_file(path)) {
        throw ConfigError(fmt::format("$.representations[{}].{}.{}: file not found: {}", i,
                                      r.kind == RepresentationKind::word_vectors ? "vectors" : "embeddings", lang,
                                      path.string()));
      }
    }
  }
  for (std::size_t i = 0; i < classifiers.size(); ++i) {
    if (!names.insert("c:" + classifiers[i].name).second) {
      throw ConfigError(fmt::format("$.classifiers[{}].name: duplicate name '{}'", i, classifiers[i].name));
    }
  }
  if (std::set<bool>(pca.begin(), pca.end()).size() != pca.size()) throw ConfigError("$.pca: duplicate values");
  for (const auto& [from, to] : fallback.static_map) {
    if (from.empty() || to.empty()) throw ConfigError("$.fallback.static_map: empty language code");
  }
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  Node root(doc, "$");
  ExperimentConfig cfg;
  cfg.data_dir = resolve(base_dir, root.string("data_dir"));

  const json& langs = root.at("languages");
  if (!langs.is_array()) fail("$.languages", "must be a list of language codes");
  for (std::size_t i = 0; i < langs.size(); ++i) {
    if (!langs[i].is_string() || langs[i].get<std::string>().empty()) {
      fail(fmt::format("$.languages[{}]", i), "must be a non-empty string");
    }
    cfg.languages.push_back(langs[i].get<std::string>());
  }
  if (std::set<std::string>(cfg.languages.begin(), cfg.languages.end()).size() != cfg.languages.size()) {
    fail("$.languages", "contains duplicates");
  }

  const json& reps = root.at("representations");
  if (!reps.is_array()) fail("$.representations", "must be a list");
  for (std::size_t i = 0; i < reps.size(); ++i) {
    cfg.representations.push_back(parse_representation(reps[i], fmt::format("$.representations[{}]", i), base_dir));
  }

  if (const json* red = root.find("reduction")) {
    Node rn(*red, "$.reduction");
    cfg.reduction.normalize = rn.boolean("normalize", true);
    if (const json* c = rn.find("components")) cfg.reduction.components = parse_components(*c, "$.reduction.components");
    rn.finish();
  }
  if (const json* pca = root.find("pca")) {
    cfg.pca.clear();
    if (pca->is_boolean()) {
      cfg.pca.push_back(pca->get<bool>());
    } else if (pca->is_array()) {
      for (std::size_t i = 0; i < pca->size(); ++i) {
        if (!(*pca)[i].is_boolean()) fail(fmt::format("$.pca[{}]", i), "must be true or false");
        cfg.pca.push_back((*pca)[i].get<bool>());
      }
    } else {
      fail("$.pca", "must be a boolean or a list of booleans");
    }
  }

  cfg.seed = root.unsigned_integer("seed", 0);
  const json& clfs = root.at("classifiers");
  if (!clfs.is_array()) fail("$.classifiers", "must be a list");
  for (std::size_t i = 0; i < clfs.size(); ++i) {
    const std::string path = fmt::format("$.classifiers[{}]", i);
    Node cn(clfs[i], path);
    ClassifierEntry entry;
    entry.spec = parse_classifier_spec(cn, path, cfg.seed);
    entry.name = cn.string("name", std::string(to_string(entry.spec.kind)));
    if (const json* g = cn.find("grid")) {
      if (entry.spec.kind != ClassifierKind::mlp) fail(cn.path("grid"), "grid search applies to mlp only");
      entry.grid = parse_grid(*g, cn.path("grid"));
      try {
        grid_search(*entry.grid, entry.spec, [](const ClassifierSpec&) { return 0.0; });
      } catch (const ConfigError& e) {
        fail(cn.path("grid"), e.what());
      }
    }
    cn.finish();
    cfg.classifiers.push_back(std::move(entry));
  }

  if (root.has("output_dir")) cfg.output_dir = resolve(base_dir, root.string("output_dir"));
  cfg.workers = root.unsigned_integer("workers", 1, 1);
  cfg.save_models = root.boolean("save_models", true);

  if (const json* fb = root.find("fallback")) {
    Node fn(*fb, "$.fallback");
    if (const json* m = fn.find("static_map")) cfg.fallback.static_map = parse_string_map(*m, "$.fallback.static_map");
    if (const json* m = fn.find("language_names")) {
      cfg.fallback.language_names = parse_string_map(*m, "$.fallback.language_names");
    }
    if (const json* l = fn.find("llm")) cfg.fallback.llm = parse_llm(*l, "$.fallback.llm");
    if (fn.has("cache")) cfg.fallback.cache_path = resolve(base_dir, fn.string("cache"));
    fn.finish();
  }
  root.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  return parse_config(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace emo
