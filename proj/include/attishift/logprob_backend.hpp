#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "attishift/cache.hpp"
#include "attishift/http.hpp"
#include "attishift/scoring.hpp"

namespace attishift::scoring {

// Separator between context and continuation in fixture keys (U+2016).
inline constexpr std::string_view kFixtureKeySeparator = "‖";

/// Logprobs read from a JSON map `{context‖continuation: number | [numbers]}`.
/// An array value lists per-piece logprobs of a multi-piece continuation.
class FixtureLogprobBackend : public LogprobBackend {
 public:
  explicit FixtureLogprobBackend(nlohmann::json table, std::string model = "fixture");
  static std::shared_ptr<FixtureLogprobBackend> from_file(const std::filesystem::path& path,
                                                          std::string model = "fixture");

  std::vector<double> continuation_logprobs(const std::string& context,
                                            const std::string& continuation) override;
  std::string model_id() const override { return model_; }
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::map<std::string, std::vector<double>> table_;
  std::string model_;
  std::atomic<std::size_t> calls_{0};
};

/// Per-word judgment log-probabilities.
///
/// Recognises which configured template a context was rendered from, pulls
/// the word back out of the slot and answers with the lexicon entry for that
/// (language, word, polarity). The lexicon file is
/// `{"en": {"cold": [pos, neg], ...}, "zh": {...}}`.
class LexiconLogprobBackend : public LogprobBackend {
 public:
  struct Entry {
    double positive = 0.0;
    double negative = 0.0;
  };
  using Table = std::map<std::string, std::map<std::string, Entry>>;

  LexiconLogprobBackend(std::vector<AttitudeTemplatePair> templates, Table table,
                        std::string model = "lexicon");
  static std::shared_ptr<LexiconLogprobBackend> from_file(
      const std::filesystem::path& path, std::vector<AttitudeTemplatePair> templates,
      std::string model = "lexicon");

  std::vector<double> continuation_logprobs(const std::string& context,
                                            const std::string& continuation) override;
  std::string model_id() const override { return model_; }
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::vector<AttitudeTemplatePair> templates_;
  Table table_;
  std::string model_;
  std::atomic<std::size_t> calls_{0};
};

/// OpenAI-compatible `/completions` endpoint scored with `echo` logprobs.
///
/// The context and continuation are sent as one prompt; the reply's prompt
/// tokens whose span ends past the context boundary are the continuation's
/// pieces. A boundary-straddling token (e.g. " Yes" after "A: ") is counted
/// as a continuation piece.
class OpenAICompletionsBackend : public LogprobBackend {
 public:
  OpenAICompletionsBackend(std::string endpoint_url, std::string model,
                           http::RequestOptions options = {});

  std::vector<double> continuation_logprobs(const std::string& context,
                                            const std::string& continuation) override;
  std::string model_id() const override { return model_; }

  nlohmann::json request_body(const std::string& context, const std::string& continuation) const;
  // Exposed for tests: extracts continuation pieces from a completions reply.
  static std::vector<double> continuation_pieces(const nlohmann::json& reply,
                                                 const std::string& context,
                                                 const std::string& continuation);

 private:
  http::Endpoint endpoint_;
  std::string model_;
  http::RequestOptions options_;
};

/// Memoises another backend's answers in a ResponseCache, keyed by
/// hash(model, context, continuation).
class CachedLogprobBackend : public LogprobBackend {
 public:
  CachedLogprobBackend(std::shared_ptr<LogprobBackend> inner, std::shared_ptr<ResponseCache> cache);

  std::vector<double> continuation_logprobs(const std::string& context,
                                            const std::string& continuation) override;
  std::string model_id() const override { return inner_->model_id(); }
  std::size_t misses() const noexcept { return misses_.load(); }

 private:
  std::shared_ptr<LogprobBackend> inner_;
  std::shared_ptr<ResponseCache> cache_;
  std::atomic<std::size_t> misses_{0};
};

/// Scorer backend description as it appears in the run configuration.
struct ScorerBackendHandle {
  std::string kind;  // fixture | lexicon | openai
  std::filesystem::path path;
  std::string endpoint;
  std::string model;
  http::RequestOptions request;
  std::size_t max_parallel = 4;
  bool use_cache = true;
};

std::shared_ptr<LogprobBackend> make_logprob_backend(
    const ScorerBackendHandle& handle, const std::vector<AttitudeTemplatePair>& templates,
    std::shared_ptr<ResponseCache> cache);

}  // namespace attishift::scoring
