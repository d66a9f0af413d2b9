#include <gtest/gtest.h>

// Same configuration as the library build, so both see one httplib layout.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <thread>

#include "emo/error.hpp"
#include "emo/language_fallback.hpp"
#include "support/temp_dir.hpp"

using namespace emo;
using testing_support::TempDir;

namespace {

class CannedTransport : public ChatTransport {
 public:
  explicit CannedTransport(std::string reply) : reply_(std::move(reply)) {}
  std::string complete(const LlmBackendConfig&, const std::vector<ChatMessage>& messages) override {
    ++calls;
    last_prompt = messages.at(0).content;
    return reply_;
  }
  int calls = 0;
  std::string last_prompt;

 private:
  std::string reply_;
};

FallbackPolicy policy() {
  FallbackPolicy p;
  p.supported = {{"en", "English"}, {"am", "Amharic"}, {"ru", "Russian"}};
  p.language_names = {{"om", "Oromo"}};
  return p;
}

}  // namespace

TEST(Fallback, NativeLanguageIsIdentity) {
  LanguageResolver r(policy());
  EXPECT_EQ(r.resolve("ru"), (LanguageResolution{"ru", Provenance::native}));
}

TEST(Fallback, StaticMap) {
  auto p = policy();
  p.static_map = {{"om", "am"}};
  LanguageResolver r(p);
  EXPECT_EQ(r.resolve("om"), (LanguageResolution{"am", Provenance::static_map}));
}

TEST(Fallback, StaticMapToUnsupportedIsRejected) {
  auto p = policy();
  p.static_map = {{"om", "xx"}};
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Fallback, NoRouteIsUnresolved) {
  LanguageResolver r(policy());
  EXPECT_THROW(r.resolve("om"), UnresolvedLanguageError);
}

TEST(Fallback, LlmReplyIsParsedAndCached) {
  TempDir dir;
  auto p = policy();
  p.llm = LlmBackendConfig{};
  p.cache_path = dir / "cache.tsv";
  auto transport = std::make_shared<CannedTransport>("The most similar language is Amharic.");
  LanguageResolver r(p, transport);
  EXPECT_EQ(r.resolve("om"), (LanguageResolution{"am", Provenance::llm}));
  EXPECT_EQ(r.resolve("om"), (LanguageResolution{"am", Provenance::llm}));
  EXPECT_EQ(transport->calls, 1);
  EXPECT_NE(transport->last_prompt.find("most similar to Oromo"), std::string::npos);

  auto fresh = std::make_shared<CannedTransport>("Russian");
  LanguageResolver reloaded(p, fresh);
  EXPECT_EQ(reloaded.resolve("om").code, "am");
  EXPECT_EQ(fresh->calls, 0);
}

TEST(Fallback, ReplyWithoutSupportedNameIsResolutionError) {
  auto p = policy();
  p.llm = LlmBackendConfig{};
  LanguageResolver r(p, std::make_shared<CannedTransport>("I cannot tell."));
  EXPECT_THROW(r.resolve("om"), ResolutionError);
}

TEST(Fallback, MatcherPrefersEarliestThenLongest) {
  const std::vector<SupportedLanguage> s{{"pt", "Portuguese"}, {"ptbr", "Portuguese(Brazilian)"}, {"en", "English"}};
  EXPECT_EQ(match_supported_language("english, then portuguese", s), "en");
  EXPECT_EQ(match_supported_language("Portuguese(Brazilian) fits", s), "ptbr");
  EXPECT_FALSE(match_supported_language("none", s));
}

TEST(Fallback, PromptSubstitutions) {
  const LlmBackendConfig cfg;
  const std::vector<std::string> known{"English", "Amharic"};
  const auto prompt = render_prompt(cfg, known, "Oromo");
  EXPECT_EQ(prompt,
            "You are a linguist working on language classification and are familiar with the given languages: "
            "English, Amharic. Please select the language from the list that is most similar to Oromo based on "
            "language family and geographic distance in terms of population distribution.");
  EXPECT_EQ(prompt, render_prompt(cfg, known, "Oromo"));
  EXPECT_THROW(render_prompt(cfg, {}, "Oromo"), ConfigError);
}

TEST(Fallback, TemplateNeedsEachPlaceholderOnce) {
  LlmBackendConfig cfg;
  cfg.prompt_template = "{given_language} only";
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.prompt_template = "{known_languages} {given_language} {given_language}";
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Fallback, ChatRequestShape) {
  LlmBackendConfig cfg;
  cfg.model = "m";
  const auto req = make_chat_request(cfg, {{"user", "hi"}});
  EXPECT_EQ(req["model"], "m");
  EXPECT_EQ(req["messages"][0]["role"], "user");
  EXPECT_EQ(req["messages"][0]["content"], "hi");
  EXPECT_EQ(extract_chat_reply(nlohmann::json::parse(R"({"choices":[{"message":{"content":"ok"}}]})")), "ok");
  EXPECT_THROW(extract_chat_reply(nlohmann::json::parse(R"({"choices":[]})")), TransportError);
}

TEST(Fallback, HttpTransportAgainstLocalServer) {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth, seen_body;
  server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"Amharic"}}]})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  LlmBackendConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
  cfg.model = "test-model";
  cfg.api_key_env = "EMO_TEST_FALLBACK_KEY";
  cfg.timeout_seconds = 5;
  ::setenv("EMO_TEST_FALLBACK_KEY", "secret", 1);
  ::unsetenv("EMO_LLM_ENDPOINT");
  HttpChatTransport transport;
  const auto reply = transport.complete(cfg, {{"user", "which?"}});
  server.stop();
  th.join();

  EXPECT_EQ(reply, "Amharic");
  EXPECT_EQ(hits.load(), 1);
  EXPECT_EQ(seen_auth, "Bearer secret");
  EXPECT_EQ(nlohmann::json::parse(seen_body)["model"], "test-model");
}

TEST(Fallback, UnreachableEndpointIsTransportError) {
  LlmBackendConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1/v1/chat";
  cfg.timeout_seconds = 1;
  ::unsetenv("EMO_LLM_ENDPOINT");
  HttpChatTransport transport;
  EXPECT_THROW(transport.complete(cfg, {{"user", "x"}}), TransportError);
}
