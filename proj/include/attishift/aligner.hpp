#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attishift/error.hpp"

namespace attishift::align {

struct Token {
  std::string text;
  std::size_t begin = 0;  // bytes
  std::size_t end = 0;
};

std::vector<std::string> token_texts(const std::vector<Token>& tokens);

class Segmenter {
 public:
  virtual ~Segmenter() = default;
  // Pure punctuation tokens are dropped.
  virtual std::vector<Token> segment(std::string_view text) const = 0;
};

// Whitespace split with punctuation peeled off word edges.
class WhitespaceSegmenter : public Segmenter {
 public:
  std::vector<Token> segment(std::string_view text) const override;
};

// Forward maximum matching against a word list for CJK runs; runs no word
// covers fall back to overlapping character bigrams (a lone character stays a
// unigram). Latin letters and digits inside the text form ordinary words.
class DictionarySegmenter : public Segmenter {
 public:
  explicit DictionarySegmenter(std::set<std::string> words = {});
  std::vector<Token> segment(std::string_view text) const override;

 private:
  std::set<std::string> words_;
  std::size_t max_chars_ = 0;
};

bool is_unsegmented_language(std::string_view lang);
std::unique_ptr<Segmenter> make_segmenter(std::string_view lang,
                                          const std::set<std::string>& dictionary = {});

/// Bilingual word list; a source word may have several targets.
class Lexicon {
 public:
  void add(std::string source, std::string target);
  // Source lookup is ASCII case-insensitive.
  const std::vector<std::string>* targets(std::string_view source) const;
  std::set<std::string> all_targets() const;
  std::size_t size() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_ == 0; }

 private:
  std::map<std::string, std::vector<std::string>> map_;
  std::size_t entries_ = 0;
};

// TSV `source<TAB>target`; blank lines and lines starting with '#' skipped.
Lexicon load_lexicon(const std::filesystem::path& path);

using SentencePair = std::pair<std::vector<std::string>, std::vector<std::string>>;

struct TrainingOptions {
  // Strength of the fixed preference for alignments near the diagonal;
  // 0 gives plain IBM Model 1.
  double diagonal_tension = 4.0;
};

/// Lexical translation table t(target | source).
struct AlignmentModel {
  std::map<std::string, std::map<std::string, double>> table;
  std::size_t iterations = 0;
  std::size_t source_vocabulary = 0;
  std::size_t target_vocabulary = 0;
  double diagonal_tension = 0.0;
  // Corpus log-likelihood before each iteration's update, then after the last.
  std::vector<double> log_likelihood;

  double probability(const std::string& source, const std::string& target) const;
};

AlignmentModel train_statistical_aligner(const std::vector<SentencePair>& pairs,
                                         std::size_t iterations,
                                         const TrainingOptions& options = {});

double corpus_log_likelihood(const AlignmentModel& model, const std::vector<SentencePair>& pairs);

enum class ExtractionMethod { lexicon, statistical, external, none };
enum class ExtractionStatus { ok, copy_failure, no_alignment };
std::string_view to_string(ExtractionMethod method);
std::string_view to_string(ExtractionStatus status);

struct ExtractionResult {
  std::optional<std::string> target_word;
  std::optional<std::size_t> target_index;  // hypothesis token, when a single token
  ExtractionMethod method = ExtractionMethod::none;
  ExtractionStatus status = ExtractionStatus::no_alignment;
};

using Links = std::vector<std::pair<std::size_t, std::size_t>>;  // (source, target)

struct ExtractionSources {
  const Lexicon* lexicon = nullptr;
  const AlignmentModel* model = nullptr;
  const Links* links = nullptr;  // external aligner output for this pair
  double floor = 0.05;
};

// Copy check first (ASCII case-insensitive), then a lexicon target found in
// the hypothesis, then the external links, then the statistical argmax.
ExtractionResult extract_target_word(const ExtractionSources& sources,
                                     const std::vector<std::string>& source_tokens,
                                     std::size_t tracked_index,
                                     const std::vector<std::string>& hypothesis_tokens);

// Index of the token containing byte `offset`, if any.
std::optional<std::size_t> token_at(const std::vector<Token>& tokens, std::size_t offset);

// Parses "0-1 2-0" into links.
Links parse_pharaoh(std::string_view line);

/// Runs an aligner command reading "source ||| target" lines and writing one
/// Pharaoh line per input. Invocations are serialized.
class ExternalAligner {
 public:
  explicit ExternalAligner(std::string command);
  std::vector<Links> align(const std::vector<SentencePair>& pairs);

 private:
  std::string command_;
  std::mutex mutex_;
};

}  // namespace attishift::align
