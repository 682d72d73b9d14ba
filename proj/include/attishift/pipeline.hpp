#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "attishift/aligner.hpp"
#include "attishift/cache.hpp"
#include "attishift/corpusgen.hpp"
#include "attishift/identity.hpp"
#include "attishift/logprob_backend.hpp"
#include "attishift/metrics.hpp"
#include "attishift/mtharness.hpp"
#include "attishift/scoring.hpp"
#include "attishift/seedselect.hpp"

namespace attishift::pipeline {

struct AlignerConfig {
  std::filesystem::path lexicon;
  bool statistical = true;
  std::size_t iterations = 10;
  double floor = 0.05;
  double diagonal_tension = 4.0;
  std::string command;  // external aligner, replaces the statistical model
};

struct SeedsConfig {
  std::filesystem::path candidates;
  std::optional<mt::TranslatorConfig> translator;
  std::optional<scoring::ScorerBackendHandle> scorer;
  std::optional<AlignerConfig> aligner;
};

/// Everything a run needs. Relative paths in the file are resolved against
/// the directory holding the configuration.
struct RunConfig {
  std::filesystem::path base_dir;
  mt::LanguagePair languages;
  std::filesystem::path corpus;
  std::filesystem::path profiles;  // empty: built-in profiles
  std::filesystem::path output_dir;
  std::filesystem::path cache;     // empty: in-memory only
  std::filesystem::path stopwords;
  std::filesystem::path scores;
  scoring::ScorerBackendHandle scorer;
  std::map<std::string, scoring::AttitudeTemplatePair> templates;
  mt::TranslatorConfig translator;
  AlignerConfig aligner;
  std::string grammar_service;
  double delta = scoring::ShiftConfig::kDefaultDelta;
  seedselect::AmbiguityBand band;
  bool moral = false;
  bool lexical = false;
  std::optional<std::vector<mt::TermPair>> lexical_terms;
  std::size_t parallel = 4;
  std::uint64_t seed = 0;
  bool allow_partial = false;
  SeedsConfig seeds;
  nlohmann::json document;  // merged configuration as loaded
};

// Applies "dotted.path=value" overrides; a value that parses as JSON is
// used as such, anything else as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Throws ConfigError on unknown keys, missing input files, delta <= 0 or an
// empty band.
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

// Warnings and progress go through this sink; defaults to nowhere.
using Logger = std::function<void(const std::string&)>;

struct Context {
  RunConfig config;
  std::vector<IdentityProfile> profiles;
  std::shared_ptr<ResponseCache> cache;
  Logger warn;
  Logger info;

  explicit Context(RunConfig cfg, Logger warn = {}, Logger info = {});
  std::filesystem::path stage_dir(std::string_view stage) const;
  mt::PromptSpec prompt_spec() const;
  // Built lazily and shared between stages of one process.
  std::shared_ptr<mt::TranslationBackend> translator();
  std::shared_ptr<scoring::Scorer> scorer();

 private:
  std::shared_ptr<mt::TranslationBackend> translator_;
  std::shared_ptr<scoring::Scorer> scorer_;
};

struct TranslatedRow {
  std::string id;
  std::string identity;
  std::string source;
  std::string reference;
  std::string word;
  corpusgen::Span word_span;
  std::optional<std::string> hypothesis;
  std::string error;
};

nlohmann::json to_json(const TranslatedRow& row);
TranslatedRow translated_from_json(const nlohmann::json& j);

using Realized = std::map<std::string, std::vector<corpusgen::RealizedPair>>;
using Translated = std::map<std::string, std::vector<TranslatedRow>>;
using Records = std::map<std::string, std::vector<metrics::TrackedRecord>>;

struct Problem {
  std::string stage;
  std::string id;
  std::string identity;
  std::string reason;
};

struct StageResult {
  std::vector<Problem> problems;
  bool ok(bool allow_partial) const { return allow_partial || problems.empty(); }
};

// In-memory stage cores.
corpusgen::ExpansionResult expand(Context& ctx, const std::vector<corpusgen::SlottedSentencePair>& corpus);
Translated translate(Context& ctx, const Realized& realized, StageResult& result);
Records score(Context& ctx, const Translated& translated, StageResult& result);
metrics::BiasReport report(Context& ctx, const Records& records);

// File-backed stages; each reads the previous stage's directory under the
// output directory and writes its own.
StageResult cmd_expand(Context& ctx);
StageResult cmd_translate(Context& ctx);
StageResult cmd_score(Context& ctx);
StageResult cmd_report(Context& ctx);
// All four stages in memory, writing the same files as the staged run.
StageResult cmd_run(Context& ctx);

struct SeedsResult {
  StageResult stage;
  std::vector<std::string> seeds;
};
SeedsResult cmd_seeds(Context& ctx);

struct KappaResult {
  double kappa = 0.0;
  std::size_t items = 0;
};
// Each CSV carries an `id` column and either `label` or `s1,s2` score pairs.
KappaResult cmd_kappa(const std::filesystem::path& a, const std::filesystem::path& b);

void write_report_files(const std::filesystem::path& dir, const metrics::BiasReport& report,
                        const Records& records, const std::vector<IdentityProfile>& profiles);

}  // namespace attishift::pipeline
