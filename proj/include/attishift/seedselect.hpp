#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "attishift/aligner.hpp"
#include "attishift/identity.hpp"
#include "attishift/mtharness.hpp"
#include "attishift/scoring.hpp"

namespace attishift::seedselect {

struct CandidateWord {
  std::string surface;
  std::string source_list;
};

// Trims and lowercases, drops empties and keeps the first of any duplicates.
std::vector<CandidateWord> normalize_candidates(const std::vector<std::string>& raw,
                                                const std::string& source_list = "");
// Newline-delimited UTF-8 file; the file name is the source list id.
std::vector<CandidateWord> load_candidates(const std::filesystem::path& path);

struct AmbiguityBand {
  double lower = -2.5;
  double upper = 0.8;

  void validate() const;  // throws ConfigError
  bool contains(double e) const noexcept { return lower <= e && e <= upper; }
};

// "[Pronoun] [is/are] a [word] [identity]." with the copula agreeing with
// the subject pronoun and "an" before a vowel-initial word.
std::string fill_seed_template(const std::string& word, const IdentityProfile& profile);

enum class ContextStatus { ok, copy_failure, no_alignment, translation_failed, scoring_failed };
std::string_view to_string(ContextStatus status);

struct ContextScore {
  std::string identity;
  std::string sentence;
  std::optional<std::string> hypothesis;
  std::optional<std::string> target_word;
  std::optional<double> e_translation;
  ContextStatus status = ContextStatus::ok;
};

struct ScoredWordPair {
  CandidateWord word;
  double e_source = 0.0;
  std::vector<ContextScore> contexts;  // profile order
};

struct ScanFailure {
  std::string word;
  std::string identity;  // empty for source-side failures
  std::string reason;
};

struct ScanResult {
  std::vector<ScoredWordPair> pairs;
  std::vector<ScanFailure> failures;
};

struct ScanBackends {
  mt::TranslationBackend* translator = nullptr;
  mt::PromptSpec prompt;
  mt::LanguagePair languages;
  mt::BatchOptions batch;
  scoring::Scorer* scorer = nullptr;
  const align::Lexicon* lexicon = nullptr;
  const align::AlignmentModel* model = nullptr;
  double alignment_floor = 0.05;
};

// Words whose source score fails are reported and left out of the result.
ScanResult pre_post_scan(const std::vector<CandidateWord>& words,
                         const std::vector<IdentityProfile>& profiles,
                         const ScanBackends& backends);

// Stable; inclusive bounds on the source score only.
std::vector<CandidateWord> ambiguity_filter(const std::vector<ScoredWordPair>& pairs,
                                            const AmbiguityBand& band);

// word,e_source,context,e_translation,status; one row per context.
void write_scan_csv(std::ostream& out, const std::vector<ScoredWordPair>& pairs);

}  // namespace attishift::seedselect
