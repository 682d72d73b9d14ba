#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "attishift/aligner.hpp"
#include "attishift/identity.hpp"
#include "attishift/scoring.hpp"

namespace attishift::metrics {

// --- BLEU -------------------------------------------------------------------

enum class BleuTokenization { character, word };
BleuTokenization default_tokenization(std::string_view language);

// character: every CJK character is a token, other runs split as in `word`.
// word: whitespace split with punctuation characters as separate tokens.
std::vector<std::string> bleu_tokenize(std::string_view text, BleuTokenization scheme);

struct BleuStats {
  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  std::size_t hypothesis_length = 0;
  std::size_t reference_length = 0;
};

BleuStats bleu_stats(const std::vector<std::string>& hypotheses,
                     const std::vector<std::string>& references, BleuTokenization scheme);

// Corpus BLEU-4 in [0, 100] with brevity penalty. An order with no matches
// uses precision 1/(2 * total); orders with no n-grams at all are left out
// of the geometric mean. Throws InputError on empty or mismatched input.
double bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            BleuTokenization scheme);
double bleu_from_stats(const BleuStats& stats);

struct StrippedPair {
  std::string hypothesis;
  std::string reference;
  bool matched = false;   // surface found in the hypothesis
  bool repeated = false;  // more than one occurrence in the hypothesis
};

// Removes the first occurrence of `surface` from the hypothesis and, when
// present, from the reference. Everything else is left byte for byte.
StrippedPair strip_correct_identity(const std::string& hypothesis, const std::string& reference,
                                    const std::string& surface);

// --- external segment scores --------------------------------------------------

struct SegmentScore {
  std::string segment_id;
  std::string identity;
  std::string metric;
  double value = 0.0;
};

struct SegmentScoreTable {
  std::vector<SegmentScore> rows;
  std::set<std::string> metrics() const;
  std::set<std::string> identities() const;
};

// CSV with header segment_id,identity,metric,value, or JSON lines with those
// keys (".jsonl"). Non-finite values and duplicate keys are rejected.
SegmentScoreTable ingest_scores(const std::filesystem::path& path);
SegmentScoreTable ingest_scores_csv(std::istream& in);
SegmentScoreTable ingest_scores_jsonl(std::istream& in);

// --- tracked records ----------------------------------------------------------

/// One realized pair after translation, extraction and scoring.
struct TrackedRecord {
  std::string id;
  std::string identity;
  std::string source;
  std::string reference;
  std::string hypothesis;
  std::string word;
  std::optional<std::string> target_word;
  std::string method;  // extraction method
  scoring::ShiftRecord shift;
};

nlohmann::json to_json(const TrackedRecord& record);
TrackedRecord tracked_from_json(const nlohmann::json& j);

// --- aggregation --------------------------------------------------------------

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n = 0;
};

// Population statistics; throws AggregationError on empty input.
MeanStd mean_std(const std::vector<double>& values);

struct IdentityRow {
  std::string identity;
  IdentityGroup group = IdentityGroup::nbg;
  std::size_t records = 0;
  std::size_t scored = 0;
  std::size_t copy_failures = 0;
  std::size_t alignment_failures = 0;
  std::optional<double> eas_source;
  std::optional<double> eas_translation;
  double r_tn = 0.0;
  double r_tp = 0.0;
  std::map<std::string, MeanStd> quality;
  std::optional<double> bleu;
  std::optional<double> identity_match_rate;
};

struct GroupRow {
  IdentityGroup group = IdentityGroup::bg;
  std::vector<std::string> members;
  std::size_t records = 0;
  std::size_t scored = 0;
  std::optional<double> eas_translation;
  double r_tn = 0.0;
  double r_tp = 0.0;
};

struct BiasReport {
  std::vector<IdentityRow> identities;  // profile order
  std::vector<GroupRow> groups;         // BG, NBG
  double shift_bias_rate = 0.0;
  std::map<std::string, MeanStd> cross_identity;  // over per-identity means
  std::map<std::string, std::set<std::string>> keywords;
  nlohmann::json metadata = nlohmann::json::object();
};

struct ReportInputs {
  std::vector<IdentityProfile> profiles;
  std::map<std::string, std::vector<TrackedRecord>> records;
  std::optional<SegmentScoreTable> scores;
  bool with_bleu = true;
  BleuTokenization bleu_scheme = BleuTokenization::character;
  std::string target_language = "zh";
  scoring::ShiftConfig shift{};
  std::map<std::string, std::set<std::string>> keywords;
  nlohmann::json metadata = nlohmann::json::object();
};

// Throws AggregationError naming every profile without records or, when a
// score table is given, without segment scores.
BiasReport aggregate_report(const ReportInputs& inputs);

// Tokens unique to each identity's outputs after stopword removal. Tokens
// seen in any other setting, the neutral one included, are dropped; the
// neutral setting gets no entry of its own.
std::map<std::string, std::set<std::string>> keyword_diff_sets(
    const std::map<std::string, std::vector<std::string>>& outputs,
    const std::set<std::string>& stopwords, const align::Segmenter& segmenter,
    const std::string& neutral_identity = "person");

std::set<std::string> load_stopwords(const std::filesystem::path& path);

// --- emission -------------------------------------------------------------------

nlohmann::json to_json(const BiasReport& report);
std::string report_text(const BiasReport& report);
std::string identity_csv(const BiasReport& report);
std::string group_csv(const BiasReport& report);
// word,e_source,e_translation,identity,status per record.
std::string scatter_csv(const std::map<std::string, std::vector<TrackedRecord>>& records,
                        const std::vector<IdentityProfile>& profiles);

}  // namespace attishift::metrics
