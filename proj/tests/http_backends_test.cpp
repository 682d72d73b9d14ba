#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <thread>

#include "attishift/corpusgen.hpp"
#include "attishift/error.hpp"
#include "attishift/logprob_backend.hpp"
#include "attishift/mtharness.hpp"
#include "attishift/scoring.hpp"

using namespace attishift;

namespace {

class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url(const std::string& base = "/v1") const {
    return "http://127.0.0.1:" + std::to_string(port_) + base;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

// Splits the echoed prompt the way a BPE tokenizer would around "Yes":
// everything up to the final space, then " Yes".
nlohmann::json completions_reply(const std::string& prompt, double yes_logprob) {
  const auto cut = prompt.rfind(' ');
  return {{"choices",
           {{{"text", ""},
             {"logprobs",
              {{"tokens", {prompt.substr(0, cut), prompt.substr(cut)}},
               {"token_logprobs", {nullptr, yes_logprob}},
               {"text_offset", {0, cut}}}}}}}};
}

http::RequestOptions fast() { return {5.0, 2, 1}; }

}  // namespace

TEST(Completions, BoundaryStraddlingTokenIsTheContinuation) {
  LocalServer s;
  s.server().Post("/v1/completions", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    EXPECT_TRUE(body["echo"].get<bool>());
    const auto prompt = body["prompt"].get<std::string>();
    const double lp = prompt.find("positive") != std::string::npos ? -0.25 : -1.5;
    res.set_content(completions_reply(prompt, lp).dump(), "application/json");
  });
  auto backend = std::make_shared<scoring::OpenAICompletionsBackend>(s.url(), "m", fast());
  EXPECT_NEAR(scoring::eas(*backend, scoring::builtin_templates("en"), "cunning"), 1.25, 1e-12);
}

TEST(Completions, CachedScoresSkipTheServer) {
  LocalServer s;
  std::atomic<int> hits{0};
  s.server().Post("/v1/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    res.set_content(completions_reply(nlohmann::json::parse(req.body)["prompt"], -0.5).dump(),
                    "application/json");
  });
  auto cache = std::make_shared<ResponseCache>();
  auto inner = std::make_shared<scoring::OpenAICompletionsBackend>(s.url(), "m", fast());
  scoring::CachedLogprobBackend cached(inner, cache);
  const auto t = scoring::builtin_templates("en");
  const double a = scoring::eas(cached, t, "bold");
  const double b = scoring::eas(cached, t, "bold");
  EXPECT_EQ(a, b);
  EXPECT_EQ(hits.load(), 2);
}

TEST(Completions, RetriesServerErrorsButNotClientErrors) {
  LocalServer s;
  std::atomic<int> hits{0};
  s.server().Post("/v1/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 503;
      return;
    }
    res.set_content(completions_reply(nlohmann::json::parse(req.body)["prompt"], -0.5).dump(),
                    "application/json");
  });
  s.server().Post("/bad/completions", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
  });
  scoring::OpenAICompletionsBackend ok(s.url(), "m", fast());
  EXPECT_EQ(ok.continuation_logprobs("Q: A:", " Yes").size(), 1u);
  EXPECT_EQ(hits.load(), 3);
  scoring::OpenAICompletionsBackend bad(s.url("/bad"), "m", fast());
  try {
    bad.continuation_logprobs("Q: A:", " Yes");
    FAIL();
  } catch (const ScoringError& e) {
    EXPECT_EQ(e.attempts(), 1);
  }
}

TEST(Completions, MissingLogprobsIsCapabilityError) {
  LocalServer s;
  s.server().Post("/v1/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[{"text":"x"}]})", "application/json");
  });
  scoring::OpenAICompletionsBackend b(s.url(), "m", fast());
  EXPECT_THROW(b.continuation_logprobs("Q: A:", " Yes"), CapabilityError);
}

TEST(Chat, SendsPromptAsOneUserMessage) {
  LocalServer s;
  std::string seen;
  s.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    seen = body["messages"][0]["content"];
    nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "这个酷儿很狡猾。"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  const mt::LanguagePair en_zh;
  const auto spec = mt::make_prompt_spec(true, false, en_zh);
  mt::ChatTranslator t(s.url(), "m", mt::task_line(spec, en_zh), {}, fast());
  const auto out = mt::translate_batch(t, spec, en_zh, {"The queer is cunning."}, {2, nullptr});
  EXPECT_EQ(out[0].hypothesis, "这个酷儿很狡猾。");
  EXPECT_EQ(seen, mt::build_prompt(spec, "The queer is cunning.", en_zh));
}

TEST(Chat, UnreachableServerIsAnItemFailure) {
  const mt::LanguagePair en_zh;
  const auto spec = mt::make_prompt_spec(false, false, en_zh);
  mt::ChatTranslator t("http://127.0.0.1:1/v1", "m", mt::task_line(spec, en_zh), {}, {1.0, 0, 1});
  const auto out = mt::translate_batch(t, spec, en_zh, {"a"}, {1, nullptr});
  EXPECT_FALSE(out[0].hypothesis);
}

TEST(LanguageTool, ServicePassAfterRules) {
  LocalServer s;
  s.server().Post("/v2/check", [](const httplib::Request& req, httplib::Response& res) {
    EXPECT_EQ(req.get_param_value("language"), "en-US");
    const auto text = req.get_param_value("text");
    nlohmann::json matches = nlohmann::json::array();
    if (const auto at = text.find("alot"); at != std::string::npos)
      matches.push_back({{"offset", at}, {"length", 4}, {"replacements", {{{"value", "a lot"}}}}});
    res.set_content(nlohmann::json{{"matches", matches}}.dump(), "application/json");
  });
  corpusgen::GrammarOptions opt;
  opt.service = std::make_shared<corpusgen::LanguageToolService>(s.url(""), fast());
  const auto profiles = default_profiles();
  EXPECT_EQ(corpusgen::apply_grammar_fixes("He laugh alot.", *find_profile(profiles, "man"), opt),
            "He laughs a lot.");
}
