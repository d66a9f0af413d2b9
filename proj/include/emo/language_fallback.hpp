#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace emo {

// Prompt used to ask a chat model for the closest supported language.
inline constexpr std::string_view kLanguageFamilyPrompt =
    "You are a linguist working on language classification and are familiar with the given languages: "
    "{known_languages}. Please select the language from the list that is most similar to {given_language} "
    "based on language family and geographic distance in terms of population distribution.";

struct LlmBackendConfig {
  std::string endpoint;  // full chat-completions URL; EMO_LLM_ENDPOINT overrides it
  std::string model;
  std::string api_key_env = "EMO_LLM_API_KEY";
  double timeout_seconds = 30.0;
  std::string prompt_template = std::string(kLanguageFamilyPrompt);

  // Each of {known_languages} and {given_language} must occur exactly once.
  void validate() const;
};

// Throws ConfigError on a bad template or an empty `known` list. Languages are
// joined with ", ".
std::string render_prompt(const LlmBackendConfig& config, std::span<const std::string> known,
                          std::string_view given);

struct SupportedLanguage {
  std::string code;
  std::string name;
};

struct FallbackPolicy {
  std::vector<SupportedLanguage> supported;
  std::map<std::string, std::string> static_map;      // unseen code -> supported code
  std::map<std::string, std::string> language_names;  // display names for unseen codes
  std::optional<LlmBackendConfig> llm;
  std::optional<std::filesystem::path> cache_path;

  // Throws ConfigError when a static target is not supported.
  void validate() const;
  bool is_supported(std::string_view code) const;
};

enum class Provenance { native, static_map, llm };
std::string_view to_string(Provenance p);  // "native" | "static" | "llm"

struct LanguageResolution {
  std::string code;
  Provenance provenance = Provenance::native;

  friend bool operator==(const LanguageResolution&, const LanguageResolution&) = default;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

// One request/reply exchange with a chat-completion service.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const LlmBackendConfig& config, const std::vector<ChatMessage>& messages) = 0;
};

// {model, messages:[{role, content}]}
nlohmann::json make_chat_request(const LlmBackendConfig& config, const std::vector<ChatMessage>& messages);

// Text of choices[0].message.content; throws TransportError when absent.
std::string extract_chat_reply(const nlohmann::json& response);

// HTTP(S) POST of the JSON request. Sends `Authorization: Bearer <key>` when the
// configured environment variable is set.
class HttpChatTransport : public ChatTransport {
 public:
  std::string complete(const LlmBackendConfig& config, const std::vector<ChatMessage>& messages) override;
};

// Case-insensitive substring scan; the name occurring earliest in the reply
// wins, and the longer name wins when two start at the same offset.
std::optional<std::string> match_supported_language(std::string_view reply,
                                                    std::span<const SupportedLanguage> supported);

// Maps a language code to a supported one: native, then static map, then the
// persistent cache, then the chat model. Thread-safe.
class LanguageResolver {
 public:
  // With an LLM backend configured and no transport given, an HttpChatTransport is used.
  explicit LanguageResolver(FallbackPolicy policy, std::shared_ptr<ChatTransport> transport = nullptr);

  LanguageResolution resolve(std::string_view language);

  const FallbackPolicy& policy() const noexcept { return policy_; }
  std::string display_name(std::string_view code) const;

 private:
  void load_cache();
  void store(const std::string& language, const std::string& resolved);

  FallbackPolicy policy_;
  std::shared_ptr<ChatTransport> transport_;
  std::mutex mutex_;
  std::map<std::string, std::string> cache_;
};

}  // namespace emo
