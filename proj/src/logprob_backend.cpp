#include "attishift/logprob_backend.hpp"

#include <fstream>
#include <sstream>

#include "attishift/error.hpp"
#include "attishift/hashing.hpp"
#include "attishift/text.hpp"

namespace attishift::scoring {

namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  auto parsed = nlohmann::json::parse(in, nullptr, false);
  if (parsed.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
  return parsed;
}

}  // namespace

FixtureLogprobBackend::FixtureLogprobBackend(nlohmann::json table, std::string model)
    : model_(std::move(model)) {
  if (!table.is_object()) throw ConfigError("logprob fixture must be a JSON object");
  for (auto& [key, value] : table.items()) {
    std::vector<double> pieces;
    if (value.is_number()) {
      pieces.push_back(value.get<double>());
    } else if (value.is_array()) {
      for (const auto& v : value) {
        if (!v.is_number()) throw ConfigError("logprob fixture entry '" + key + "' is not numeric");
        pieces.push_back(v.get<double>());
      }
    } else {
      throw ConfigError("logprob fixture entry '" + key + "' must be a number or array");
    }
    table_.emplace(key, std::move(pieces));
  }
}

std::shared_ptr<FixtureLogprobBackend> FixtureLogprobBackend::from_file(
    const std::filesystem::path& path, std::string model) {
  return std::make_shared<FixtureLogprobBackend>(read_json_file(path), std::move(model));
}

std::vector<double> FixtureLogprobBackend::continuation_logprobs(const std::string& context,
                                                                 const std::string& continuation) {
  ++calls_;
  const std::string key = context + std::string(kFixtureKeySeparator) + continuation;
  auto it = table_.find(key);
  if (it == table_.end()) throw ScoringError("no fixture logprob for '" + key + "'", 1);
  return it->second;
}

LexiconLogprobBackend::LexiconLogprobBackend(std::vector<AttitudeTemplatePair> templates,
                                             Table table, std::string model)
    : templates_(std::move(templates)), table_(std::move(table)), model_(std::move(model)) {
  for (const auto& t : templates_) t.validate();
}

std::shared_ptr<LexiconLogprobBackend> LexiconLogprobBackend::from_file(
    const std::filesystem::path& path, std::vector<AttitudeTemplatePair> templates,
    std::string model) {
  const auto doc = read_json_file(path);
  if (!doc.is_object()) throw ConfigError("scorer lexicon must map language -> word table");
  Table table;
  for (const auto& [lang, words] : doc.items()) {
    if (!words.is_object())
      throw ConfigError("scorer lexicon entry for '" + lang + "' must be an object");
    auto& dest = table[lang];
    for (const auto& [word, pair] : words.items()) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
        throw ConfigError("scorer lexicon entry '" + lang + "/" + word +
                          "' must be [positive, negative]");
      dest[word] = Entry{pair[0].get<double>(), pair[1].get<double>()};
    }
  }
  return std::make_shared<LexiconLogprobBackend>(std::move(templates), std::move(table),
                                                 std::move(model));
}

std::vector<double> LexiconLogprobBackend::continuation_logprobs(const std::string& context,
                                                                 const std::string& continuation) {
  ++calls_;
  for (const auto& tmpl : templates_) {
    if (continuation != tmpl.judgment_token) continue;
    for (int polarity = 0; polarity < 2; ++polarity) {
      const auto& full = polarity == 0 ? tmpl.positive_template : tmpl.negative_template;
      const auto body = judgment_context(full, tmpl.judgment_token);
      const auto slot = body.find(kWordSlot);
      const std::string_view before = std::string_view(body).substr(0, slot);
      const std::string_view after = std::string_view(body).substr(slot + kWordSlot.size());
      if (context.size() <= before.size() + after.size()) continue;
      if (context.compare(0, before.size(), before) != 0) continue;
      if (context.compare(context.size() - after.size(), after.size(), after) != 0) continue;
      const std::string word =
          context.substr(before.size(), context.size() - before.size() - after.size());
      auto lang = table_.find(tmpl.language);
      if (lang == table_.end()) continue;
      auto hit = lang->second.find(word);
      if (hit == lang->second.end())
        throw ScoringError("scorer lexicon has no entry for " + tmpl.language + " word '" + word +
                               "'",
                           1);
      return {polarity == 0 ? hit->second.positive : hit->second.negative};
    }
  }
  throw CapabilityError("context matches no configured judgment template: " + context);
}

OpenAICompletionsBackend::OpenAICompletionsBackend(std::string endpoint_url, std::string model,
                                                   http::RequestOptions options)
    : endpoint_(http::parse_endpoint(endpoint_url)),
      model_(std::move(model)),
      options_(options) {}

nlohmann::json OpenAICompletionsBackend::request_body(const std::string& context,
                                                      const std::string& continuation) const {
  return {{"model", model_},     {"prompt", context + continuation},
          {"max_tokens", 1},     {"echo", true},
          {"logprobs", 1},       {"temperature", 0}};
}

std::vector<double> OpenAICompletionsBackend::continuation_pieces(
    const nlohmann::json& reply, const std::string& context, const std::string& continuation) {
  if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty())
    throw CapabilityError("completions reply has no choices");
  const auto& choice = reply["choices"][0];
  if (!choice.contains("logprobs") || !choice["logprobs"].is_object())
    throw CapabilityError("completions reply carries no logprobs (echo unsupported?)");
  const auto& lp = choice["logprobs"];
  if (!lp.contains("tokens") || !lp.contains("token_logprobs") || !lp["tokens"].is_array() ||
      !lp["token_logprobs"].is_array() || lp["tokens"].size() != lp["token_logprobs"].size())
    throw CapabilityError("completions logprobs lack tokens/token_logprobs");
  const auto& tokens = lp["tokens"];
  const auto& logprobs = lp["token_logprobs"];
  const std::size_t n = tokens.size();

  std::vector<std::size_t> offsets(n);
  if (lp.contains("text_offset") && lp["text_offset"].is_array() &&
      lp["text_offset"].size() == n) {
    for (std::size_t i = 0; i < n; ++i) offsets[i] = lp["text_offset"][i].get<std::size_t>();
  } else {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      offsets[i] = pos;
      pos += text::utf8_length(tokens[i].get<std::string>());
    }
  }

  const std::size_t boundary = text::utf8_length(context);
  const std::size_t prompt_end = boundary + text::utf8_length(continuation);
  std::vector<double> pieces;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = offsets[i];
    const std::size_t end =
        i + 1 < n ? offsets[i + 1] : start + text::utf8_length(tokens[i].get<std::string>());
    if (start >= prompt_end || end <= boundary) continue;
    if (!logprobs[i].is_number())
      throw CapabilityError("missing logprob for continuation token " + std::to_string(i));
    pieces.push_back(logprobs[i].get<double>());
  }
  if (pieces.empty()) throw CapabilityError("no reply tokens cover the continuation");
  return pieces;
}

std::vector<double> OpenAICompletionsBackend::continuation_logprobs(
    const std::string& context, const std::string& continuation) {
  nlohmann::json reply;
  try {
    reply = http::post_json(endpoint_, "/completions", request_body(context, continuation),
                            options_);
  } catch (const http::TransportError& e) {
    throw ScoringError(std::string("logprob request failed: ") + e.what(), e.attempts());
  }
  return continuation_pieces(reply, context, continuation);
}

CachedLogprobBackend::CachedLogprobBackend(std::shared_ptr<LogprobBackend> inner,
                                           std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {
  if (!inner_ || !cache_) throw ConfigError("cached backend needs a backend and a cache");
}

std::vector<double> CachedLogprobBackend::continuation_logprobs(const std::string& context,
                                                                const std::string& continuation) {
  const auto key = cache_key({"pll", inner_->model_id(), context, continuation});
  if (auto hit = cache_->get(key)) return hit->get<std::vector<double>>();
  ++misses_;
  auto pieces = inner_->continuation_logprobs(context, continuation);
  cache_->put(key, pieces);
  return pieces;
}

std::shared_ptr<LogprobBackend> make_logprob_backend(
    const ScorerBackendHandle& handle, const std::vector<AttitudeTemplatePair>& templates,
    std::shared_ptr<ResponseCache> cache) {
  std::shared_ptr<LogprobBackend> backend;
  std::string model = handle.model.empty() ? handle.kind : handle.model;
  // Local tables are named after their content so caches never mix them up.
  if (handle.model.empty() && !handle.path.empty() &&
      (handle.kind == "fixture" || handle.kind == "lexicon")) {
    std::ifstream in(handle.path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scorer table " + handle.path.string());
    std::ostringstream bytes;
    bytes << in.rdbuf();
    model += ":" + sha256_hex(bytes.str()).substr(0, 12);
  }
  if (handle.kind == "fixture") {
    if (handle.path.empty()) throw ConfigError("fixture scorer needs a path");
    backend = FixtureLogprobBackend::from_file(handle.path, model);
  } else if (handle.kind == "lexicon") {
    if (handle.path.empty()) throw ConfigError("lexicon scorer needs a path");
    backend = LexiconLogprobBackend::from_file(handle.path, templates, model);
  } else if (handle.kind == "openai") {
    if (handle.endpoint.empty()) throw ConfigError("openai scorer needs an endpoint");
    if (handle.model.empty()) throw ConfigError("openai scorer needs a model");
    backend = std::make_shared<OpenAICompletionsBackend>(handle.endpoint, handle.model,
                                                         handle.request);
  } else {
    throw ConfigError("unknown scorer kind '" + handle.kind + "'");
  }
  if (handle.use_cache && cache) return std::make_shared<CachedLogprobBackend>(backend, cache);
  return backend;
}

}  // namespace attishift::scoring
