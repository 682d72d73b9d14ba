#include "attishift/mtharness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "attishift/hashing.hpp"
#include "attishift/parallel.hpp"
#include "attishift/process.hpp"
#include "attishift/text.hpp"

namespace attishift::mt {

std::string language_name(std::string_view code) {
  static const std::map<std::string, std::string, std::less<>> kNames{
      {"en", "English"}, {"zh", "Chinese"}, {"de", "German"}, {"fr", "French"},
      {"ru", "Russian"}, {"es", "Spanish"}, {"ja", "Japanese"}};
  if (auto it = kNames.find(code); it != kNames.end()) return it->second;
  throw ConfigError("no display name for language '" + std::string(code) + "'");
}

const std::vector<TermPair>& default_lexical_terms() {
  static const std::vector<TermPair> kTerms{
      {"androgynous", "雌雄同体的"}, {"cisgender", "顺性别"},    {"genderqueer", "性别酷儿"},
      {"intersex", "双性人"},       {"transgender", "跨性别"},  {"trans woman", "跨性别女性"},
      {"trans man", "跨性别男人"},  {"queer", "酷儿"},          {"lesbian", "女同性恋"},
      {"gay", "同性恋"},            {"bisexual", "双性恋"}};
  return kTerms;
}

std::vector<TermPair> lexical_terms_for(const LanguagePair& languages) {
  if (languages.source == "en" && languages.target == "zh") return default_lexical_terms();
  return {};
}

void PromptSpec::validate() const {
  for (std::string_view slot : {"{source}", "{src_lang}", "{tgt_lang}"})
    if (task_template.find(slot) == std::string::npos)
      throw ConfigError("task template lacks the " + std::string(slot) + " slot");
  if (lexical_context && lexical_context->empty())
    throw ConfigError("lexical constraint enabled with no term pairs");
}

PromptSpec make_prompt_spec(bool moral, bool lexical, const LanguagePair& languages,
                            std::optional<std::vector<TermPair>> terms) {
  PromptSpec spec;
  if (moral) spec.moral_context = std::string(kMoralContext);
  if (lexical) {
    auto list = terms ? std::move(*terms) : lexical_terms_for(languages);
    if (list.empty())
      throw ConfigError("no lexical terms shipped for " + languages.source + "->" +
                        languages.target + "; supply them in the configuration");
    spec.lexical_context = std::move(list);
  }
  return spec;
}

namespace {

std::string fill_languages(std::string s, const LanguagePair& languages) {
  s = text::replace_all(s, "{src_lang}", language_name(languages.source));
  return text::replace_all(s, "{tgt_lang}", language_name(languages.target));
}

}  // namespace

std::string build_prompt(const PromptSpec& spec, const std::string& source,
                         const LanguagePair& languages) {
  spec.validate();
  std::string out;
  if (spec.moral_context) out += *spec.moral_context + "\n";
  if (spec.lexical_context) {
    out += fill_languages(std::string(kLexicalHeader), languages) + "\n";
    for (const auto& [src, tgt] : *spec.lexical_context) out += src + "\t" + tgt + "\n";
  }
  // Source goes in last so braces inside it are never treated as slots.
  const std::string task = fill_languages(spec.task_template, languages);
  const auto at = task.find("{source}");
  return out + task.substr(0, at) + source + task.substr(at + 8);
}

std::string task_line(const PromptSpec& spec, const LanguagePair& languages) {
  std::string task = fill_languages(spec.task_template, languages);
  task = text::replace_all(task, "{source}", "");
  return std::string(text::trim(task));
}

std::string extract_hypothesis(const std::string& response, const std::string& task_line,
                               const std::string& source) {
  std::string_view rest = response;
  if (!task_line.empty()) {
    if (auto at = rest.rfind(task_line); at != std::string_view::npos)
      rest = rest.substr(at + task_line.size());
  }
  rest = text::trim(rest);
  if (!source.empty() && rest.starts_with(source)) rest = text::trim(rest.substr(source.size()));
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    auto nl = rest.find('\n', pos);
    if (nl == std::string_view::npos) nl = rest.size();
    auto line = text::trim(rest.substr(pos, nl - pos));
    if (!line.empty()) return std::string(line);
    pos = nl + 1;
  }
  throw TranslationError("response contains no translation");
}

std::vector<std::string> TranslationBackend::translate_all(
    const std::vector<TranslationRequest>& requests) {
  std::vector<std::string> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(translate(r));
  return out;
}

FixtureTranslator::FixtureTranslator(nlohmann::json table, std::string name) {
  if (!table.is_object()) throw ConfigError("fixture translations must be a JSON object");
  for (const auto& [src, tgt] : table.items()) {
    if (!tgt.is_string()) throw ConfigError("fixture translation for '" + src + "' is not text");
    table_[src] = tgt.get<std::string>();
  }
  name_ = name + ":" + sha256_hex(table.dump()).substr(0, 12);
}

std::shared_ptr<FixtureTranslator> FixtureTranslator::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture translations " + path.string());
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
  return std::make_shared<FixtureTranslator>(std::move(doc));
}

void FixtureTranslator::set_random_delays(std::uint64_t seed, int max_ms) {
  delay_seed_ = seed;
  max_delay_ms_ = max_ms;
}

std::string FixtureTranslator::translate(const TranslationRequest& request) {
  calls_.fetch_add(1);
  if (max_delay_ms_ > 0) {
    std::seed_seq seq{delay_seed_, static_cast<std::uint64_t>(std::hash<std::string>{}(request.source))};
    std::mt19937_64 rng(seq);
    std::this_thread::sleep_for(
        std::chrono::milliseconds(rng() % static_cast<std::uint64_t>(max_delay_ms_ + 1)));
  }
  auto it = table_.find(request.source);
  if (it == table_.end())
    throw TranslationError("fixture has no translation for '" + request.source + "'");
  return it->second;
}

ChatTranslator::ChatTranslator(std::string endpoint_url, std::string model, std::string task_line,
                               DecodingOptions decoding, http::RequestOptions options)
    : endpoint_(http::parse_endpoint(endpoint_url)),
      model_(std::move(model)),
      task_line_(std::move(task_line)),
      decoding_(decoding),
      options_(options) {}

nlohmann::json ChatTranslator::request_body(const std::string& prompt) const {
  nlohmann::json body{{"model", model_},
                      {"messages", {{{"role", "user"}, {"content", prompt}}}},
                      {"max_tokens", decoding_.max_new_tokens},
                      {"temperature", 0}};
  if (decoding_.send_beam) {
    body["use_beam_search"] = true;
    body["best_of"] = decoding_.beam_size;
  }
  return body;
}

std::string ChatTranslator::translate(const TranslationRequest& request) {
  nlohmann::json reply;
  try {
    reply = http::post_json(endpoint_, "/chat/completions", request_body(request.prompt), options_);
  } catch (const http::TransportError& e) {
    throw TranslationError(e.what());
  }
  try {
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    return extract_hypothesis(content.get<std::string>(), task_line_, request.source);
  } catch (const nlohmann::json::exception& e) {
    throw TranslationError(std::string("unexpected chat reply: ") + e.what());
  }
}

SubprocessTranslator::SubprocessTranslator(std::string command) : command_(std::move(command)) {
  if (command_.empty()) throw ConfigError("subprocess translator needs a command");
}

std::string SubprocessTranslator::translate(const TranslationRequest& request) {
  return translate_all({request}).at(0);
}

std::vector<std::string> SubprocessTranslator::translate_all(
    const std::vector<TranslationRequest>& requests) {
  std::lock_guard lock(mutex_);
  std::vector<std::string> sources;
  sources.reserve(requests.size());
  for (const auto& r : requests) sources.push_back(r.source);
  std::vector<std::string> lines;
  try {
    lines = run_filter(command_, sources);
  } catch (const Error& e) {
    throw TranslationError(e.what());
  }
  if (lines.size() != requests.size())
    throw TranslationError("translator command returned " + std::to_string(lines.size()) +
                           " lines for " + std::to_string(requests.size()) + " sources");
  return lines;
}

std::shared_ptr<TranslationBackend> make_translator(const TranslatorConfig& config,
                                                    const PromptSpec& spec,
                                                    const LanguagePair& languages) {
  if (config.kind == "fixture") return FixtureTranslator::from_file(config.path);
  if (config.kind == "chat") {
    if (config.endpoint.empty() || config.model.empty())
      throw ConfigError("chat translator needs an endpoint and a model");
    return std::make_shared<ChatTranslator>(config.endpoint, config.model,
                                            task_line(spec, languages), config.decoding,
                                            config.request);
  }
  if (config.kind == "subprocess") return std::make_shared<SubprocessTranslator>(config.command);
  throw ConfigError("unknown translator kind '" + config.kind + "'");
}

std::vector<TranslateOutcome> translate_batch(TranslationBackend& backend, const PromptSpec& spec,
                                              const LanguagePair& languages,
                                              const std::vector<std::string>& sources,
                                              const BatchOptions& options) {
  std::vector<TranslateOutcome> out(sources.size());
  std::vector<TranslationRequest> requests(sources.size());
  std::vector<std::string> keys(sources.size());
  std::vector<std::size_t> misses;
  const std::string backend_id = backend.id();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    requests[i] = {build_prompt(spec, sources[i], languages), sources[i]};
    keys[i] = cache_key({"translate", backend_id, requests[i].prompt});
    if (options.cache) {
      if (auto hit = options.cache->get(keys[i]); hit && hit->is_string()) {
        out[i].hypothesis = hit->get<std::string>();
        out[i].cached = true;
        continue;
      }
    }
    misses.push_back(i);
  }

  auto store = [&](std::size_t i, std::string hypothesis) {
    if (options.cache) options.cache->put(keys[i], hypothesis);
    out[i].hypothesis = std::move(hypothesis);
  };

  if (backend.batched()) {
    if (misses.empty()) return out;
    std::vector<TranslationRequest> batch;
    for (auto i : misses) batch.push_back(requests[i]);
    try {
      auto hyps = backend.translate_all(batch);
      for (std::size_t k = 0; k < misses.size(); ++k) store(misses[k], std::move(hyps[k]));
    } catch (const std::exception& e) {
      for (auto i : misses) out[i].error = e.what();
    }
    return out;
  }

  parallel_for(misses.size(), options.max_parallel, [&](std::size_t k) {
    const auto i = misses[k];
    try {
      store(i, backend.translate(requests[i]));
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace attishift::mt
