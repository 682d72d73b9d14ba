#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attishift/error.hpp"
#include "attishift/http.hpp"
#include "attishift/identity.hpp"

namespace attishift::corpusgen {

inline constexpr std::string_view kIdentitySlot = "[IDENTITY]";

enum class Origin { authentic, synthesized };
std::string_view to_string(Origin origin);
Origin parse_origin(std::string_view s);

// Half-open range in Unicode code points.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

/// Parallel sentence pair annotated with identity and pronoun slots.
///
/// `source_text` and `target_text` each hold exactly one `[IDENTITY]` slot
/// and any number of `[PRON:role]` slots. `word_span` locates the tracked
/// attitude word inside `source_text`.
struct SlottedSentencePair {
  std::string id;
  std::string source_text;
  std::string target_text;
  std::string tracked_word;
  Span word_span;
  Origin origin = Origin::authentic;

  void validate() const;  // throws InputError
};

// Parses one JSON-lines record {id, src, tgt, word, word_span, origin}.
SlottedSentencePair parse_slotted(std::string_view line, std::size_t line_no);
nlohmann::json to_json(const SlottedSentencePair& pair);

struct LoadResult {
  std::vector<SlottedSentencePair> pairs;
  std::vector<ParseError> errors;
};
// Blank lines are skipped; every malformed line is reported, none aborts.
LoadResult load_slotted(const std::filesystem::path& path);

struct RealizedPair {
  std::string id;
  std::string identity;
  std::string source;
  std::string target;
  std::string tracked_word;
  Span word_span;  // in `source`
  Origin origin = Origin::authentic;
};

nlohmann::json to_json(const RealizedPair& pair);
RealizedPair realized_from_json(const nlohmann::json& j);

struct LanguageSides {
  std::string source = "en";
  std::string target = "zh";
};

// Replacement of `length` bytes at `offset`.
struct TextEdit {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string replacement;
};

/// Second-pass grammar correction, e.g. a LanguageTool server.
class GrammarService {
 public:
  virtual ~GrammarService() = default;
  // Edits in byte offsets of `text`. Throws on transport failure.
  virtual std::vector<TextEdit> check(const std::string& text, std::string_view language) = 0;
};

/// LanguageTool-compatible `/v2/check` client; applies each match's first
/// replacement.
class LanguageToolService : public GrammarService {
 public:
  explicit LanguageToolService(std::string endpoint_url, http::RequestOptions options = {});
  std::vector<TextEdit> check(const std::string& text, std::string_view language) override;

  // Exposed for tests: converts a /v2/check reply to byte-offset edits.
  static std::vector<TextEdit> edits_from_reply(const nlohmann::json& reply,
                                                const std::string& text);

 private:
  http::Endpoint endpoint_;
  http::RequestOptions options_;
};

struct GrammarOptions {
  std::shared_ptr<GrammarService> service;
  std::function<void(const std::string&)> warn;
};

// Rule-based English agreement repair for the profile's subject pronoun:
// copulas and auxiliaries ("she are" -> "she is"), third-person verb
// number after optional adverbs ("He never give" -> "He never gives") and
// stray plural reflexives. Then the optional service pass; service
// failures fall back to the rule output with a warning.
std::string apply_grammar_fixes(std::string_view text, const IdentityProfile& profile,
                                const GrammarOptions& options = {});

RealizedPair realize_identity(const SlottedSentencePair& pair, const IdentityProfile& profile,
                              const LanguageSides& sides = {}, const GrammarOptions& options = {});

// Inverse of realization for profiles whose pronoun forms are distinct per
// role: puts the slot markers back.
std::string reslot_source(std::string_view realized, const IdentityProfile& profile,
                          std::string_view language = "en");

struct ManifestEntry {
  std::string id;
  std::string identity;
  std::string reason;
};

struct ExpansionResult {
  std::vector<std::string> identities;  // profile order
  std::map<std::string, std::vector<RealizedPair>> settings;
  std::vector<ManifestEntry> manifest;
  std::size_t total_pairs() const;
};

struct ExpansionOptions {
  LanguageSides sides;
  GrammarOptions grammar;
  std::size_t max_parallel = 1;
};

// Realizes every pair for every profile. A pair that fails for any profile
// is dropped from all settings so they stay parallel.
ExpansionResult expand_corpus(const std::vector<SlottedSentencePair>& corpus,
                              const std::vector<IdentityProfile>& profiles,
                              const ExpansionOptions& options = {});

// Unique n-grams over total n-grams, counted within each sentence over
// whitespace tokens. Throws MetricError when there are no n-grams at all.
double distinct_n(const std::vector<std::string>& corpus, std::size_t n);

inline constexpr std::array<std::string_view, 7> kSynthesisPrefixes{
    "Everyone says the person",
    "The person is known for",
    "The person once impressed others with",
    "The person once disappointed others with",
    "Everyone agrees that the person is",
    "The person is described as",
    "The person is renowned for",
};

// One sentence-synthesis instruction per prefix, for a chat backend.
std::vector<std::string> synthesis_prompts(std::string_view seed_word);

}  // namespace attishift::corpusgen
