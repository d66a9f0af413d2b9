#include "emo/language_fallback.hpp"

#include <algorithm>
#include <fstream>

#include "emo/corpus.hpp"
#include "emo/error.hpp"
#include "emo/unicode.hpp"

namespace emo {
namespace {

constexpr std::string_view kKnown = "{known_languages}";
constexpr std::string_view kGiven = "{given_language}";

std::size_t occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

void LlmBackendConfig::validate() const {
  for (auto placeholder : {kKnown, kGiven}) {
    const auto n = occurrences(prompt_template, placeholder);
    if (n != 1) {
      throw ConfigError("prompt template must contain " + std::string(placeholder) + " exactly once (found " +
                        std::to_string(n) + ")");
    }
  }
  if (timeout_seconds <= 0) throw ConfigError("LLM timeout must be positive");
}

std::string render_prompt(const LlmBackendConfig& config, std::span<const std::string> known, std::string_view given) {
  config.validate();
  if (known.empty()) throw ConfigError("render_prompt: no known languages");
  std::string list;
  for (std::size_t i = 0; i < known.size(); ++i) {
    if (i) list += ", ";
    list += known[i];
  }
  // Splice both values in one pass so a substituted value is never re-scanned.
  const auto& t = config.prompt_template;
  const auto known_pos = t.find(kKnown);
  const auto given_pos = t.find(kGiven);
  const bool known_first = known_pos < given_pos;
  const auto first_pos = known_first ? known_pos : given_pos;
  const auto first_len = known_first ? kKnown.size() : kGiven.size();
  const auto second_pos = known_first ? given_pos : known_pos;
  const auto second_len = known_first ? kGiven.size() : kKnown.size();
  std::string out = t.substr(0, first_pos);
  out += known_first ? std::string_view(list) : given;
  out += t.substr(first_pos + first_len, second_pos - first_pos - first_len);
  out += known_first ? given : std::string_view(list);
  out += t.substr(second_pos + second_len);
  return out;
}

void FallbackPolicy::validate() const {
  for (const auto& [from, to] : static_map) {
    if (!is_supported(to)) {
      throw ConfigError("static fallback " + from + " -> " + to + " targets an unsupported language");
    }
  }
  if (llm) llm->validate();
}

bool FallbackPolicy::is_supported(std::string_view code) const {
  return std::any_of(supported.begin(), supported.end(), [&](const SupportedLanguage& s) { return s.code == code; });
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::native: return "native";
    case Provenance::static_map: return "static";
    case Provenance::llm: return "llm";
  }
  return "?";
}

nlohmann::json make_chat_request(const LlmBackendConfig& config, const std::vector<ChatMessage>& messages) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", config.model}, {"messages", std::move(msgs)}};
}

std::string extract_chat_reply(const nlohmann::json& response) {
  const auto* choices = response.contains("choices") ? &response.at("choices") : nullptr;
  if (!choices || !choices->is_array() || choices->empty()) {
    throw TransportError("chat reply has no choices");
  }
  const auto& first = choices->at(0);
  if (!first.contains("message") || !first.at("message").contains("content") ||
      !first.at("message").at("content").is_string()) {
    throw TransportError("chat reply has no message content");
  }
  return first.at("message").at("content").get<std::string>();
}

std::optional<std::string> match_supported_language(std::string_view reply,
                                                    std::span<const SupportedLanguage> supported) {
  const std::string folded = unicode::fold_case(reply);
  std::optional<std::string> best;
  std::size_t best_pos = std::string::npos;
  std::size_t best_len = 0;
  for (const auto& lang : supported) {
    if (lang.name.empty()) continue;
    const std::string name = unicode::fold_case(lang.name);
    const auto pos = folded.find(name);
    if (pos == std::string::npos) continue;
    if (pos < best_pos || (pos == best_pos && name.size() > best_len)) {
      best = lang.code;
      best_pos = pos;
      best_len = name.size();
    }
  }
  return best;
}

LanguageResolver::LanguageResolver(FallbackPolicy policy, std::shared_ptr<ChatTransport> transport)
    : policy_(std::move(policy)), transport_(std::move(transport)) {
  policy_.validate();
  if (policy_.llm && !transport_) transport_ = std::make_shared<HttpChatTransport>();
  load_cache();
}

std::string LanguageResolver::display_name(std::string_view code) const {
  if (auto it = policy_.language_names.find(std::string(code)); it != policy_.language_names.end()) return it->second;
  for (const auto& s : policy_.supported) {
    if (s.code == code && !s.name.empty()) return s.name;
  }
  if (const auto* d = find_declared_sizes(code)) return std::string(d->name);
  return std::string(code);
}

void LanguageResolver::load_cache() {
  if (!policy_.cache_path) return;
  std::ifstream in(*policy_.cache_path);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    auto from = line.substr(0, tab);
    auto to = line.substr(tab + 1);
    // Entries pointing outside the current supported set are stale.
    if (policy_.is_supported(to)) cache_[from] = to;
  }
}

void LanguageResolver::store(const std::string& language, const std::string& resolved) {
  std::lock_guard lock(mutex_);
  if (!cache_.emplace(language, resolved).second) return;
  if (!policy_.cache_path) return;
  std::ofstream out(*policy_.cache_path, std::ios::app);
  if (!out) throw Error("cannot append to language cache " + policy_.cache_path->string());
  out << language << '\t' << resolved << '\n';
}

LanguageResolution LanguageResolver::resolve(std::string_view language) {
  const std::string lang(language);
  if (policy_.is_supported(lang)) return {lang, Provenance::native};
  if (auto it = policy_.static_map.find(lang); it != policy_.static_map.end()) {
    return {it->second, Provenance::static_map};
  }
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(lang); it != cache_.end()) return {it->second, Provenance::llm};
  }
  if (!policy_.llm) {
    throw UnresolvedLanguageError("language '" + lang + "' is not supported and has no static or LLM fallback");
  }

  std::vector<std::string> known;
  known.reserve(policy_.supported.size());
  for (const auto& s : policy_.supported) known.push_back(s.name.empty() ? s.code : s.name);
  const auto prompt = render_prompt(*policy_.llm, known, display_name(lang));
  const auto reply = transport_->complete(*policy_.llm, {{"user", prompt}});

  auto match = match_supported_language(reply, policy_.supported);
  if (!match) {
    throw ResolutionError("LLM reply for '" + lang + "' names no supported language: " + reply, reply);
  }
  store(lang, *match);
  return {*match, Provenance::llm};
}

}  // namespace emo
