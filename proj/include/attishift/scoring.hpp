#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attishift::scoring {

inline constexpr std::string_view kWordSlot = "[word]";

/// Positive/negative yes-no judgment templates for one language.
///
/// Each template holds a single `[word]` slot and ends with the judgment
/// token, e.g. "Q: Is [word] a positive word? A: Yes". The two templates may
/// differ only in the polarity word.
struct AttitudeTemplatePair {
  std::string language;
  std::string positive_template;
  std::string negative_template;
  std::string judgment_token;

  // Throws TemplateError naming the violated invariant.
  void validate() const;
  AttitudeTemplatePair swapped() const;
};

// Built-in templates for "en", "zh" and "de". Throws TemplateError for other
// languages; those must come from the run configuration.
AttitudeTemplatePair builtin_templates(std::string_view language);

struct JudgmentPrompts {
  std::string positive_prompt;
  std::string negative_prompt;
  std::string judgment_token;
};

JudgmentPrompts render_judgment_prompts(const AttitudeTemplatePair& templates,
                                        std::string_view word);

// The rendered prompt minus its trailing judgment token; this is the context
// the token is force-continued from.
std::string judgment_context(std::string_view prompt, std::string_view judgment_token);

/// Source of continuation log-probabilities.
///
/// Implementations return the log-probability of each piece the
/// continuation tokenizes into, conditioned on `context`.
class LogprobBackend {
 public:
  virtual ~LogprobBackend() = default;
  virtual std::vector<double> continuation_logprobs(const std::string& context,
                                                    const std::string& continuation) = 0;
  virtual std::string model_id() const = 0;
};

// The judgment token's joint log-probability: sum over its pieces.
double pll(LogprobBackend& backend, const std::string& context, const std::string& judgment_token);

// Emotional attitude score: pll(positive) - pll(negative). Positive values
// mean a positive attitude.
double eas(LogprobBackend& backend, const AttitudeTemplatePair& templates, std::string_view word);

/// Scores words with per-language templates over a shared backend.
class Scorer {
 public:
  Scorer(std::shared_ptr<LogprobBackend> backend,
         std::map<std::string, AttitudeTemplatePair> templates, std::size_t max_parallel = 1);

  double eas(std::string_view language, std::string_view word) const;

  struct Outcome {
    std::optional<double> value;
    std::string error;
  };
  // Scores in parallel; results are in input order and failures are isolated.
  std::vector<Outcome> eas_many(std::string_view language,
                                const std::vector<std::string>& words) const;

  const AttitudeTemplatePair& templates(std::string_view language) const;
  const LogprobBackend& backend() const { return *backend_; }
  std::size_t max_parallel() const noexcept { return max_parallel_; }

 private:
  std::shared_ptr<LogprobBackend> backend_;
  std::map<std::string, AttitudeTemplatePair, std::less<>> templates_;
  std::size_t max_parallel_;
};

// Arithmetic mean of per-sentence scores. Throws AggregationError on empty
// input rather than reporting 0.
double corpus_eas(std::span<const double> scores);

/// Attitude-judgment threshold; always strictly positive.
class ShiftConfig {
 public:
  static constexpr double kDefaultDelta = 0.2;
  explicit ShiftConfig(double delta = kDefaultDelta);
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
};

enum class ScoreStatus { scored, copy_failure, alignment_failure };

struct ShiftRecord {
  double e_src = 0.0;
  std::optional<double> e_hypo;
  ScoreStatus status = ScoreStatus::scored;

  static ShiftRecord scored(double e_src, double e_hypo) {
    return {e_src, e_hypo, ScoreStatus::scored};
  }
  static ShiftRecord unscored(double e_src, ScoreStatus status);
  bool consistent() const noexcept { return e_hypo.has_value() == (status == ScoreStatus::scored); }
};

enum class ShiftClass { to_negative, to_positive, stable, unscored };

ShiftClass classify_shift(const ShiftRecord& record, const ShiftConfig& config);

struct ShiftCounts {
  std::size_t to_negative = 0;
  std::size_t to_positive = 0;
  std::size_t stable = 0;
  std::size_t unscored = 0;
  std::size_t total = 0;
};

// Rates are percentages whose denominator is every record, unscored ones
// included; `counts` lets callers recompute with a filtered denominator.
struct ShiftRates {
  double r_tn = 0.0;
  double r_tp = 0.0;
  ShiftCounts counts;
};

ShiftRates shift_rates(std::span<const ShiftRecord> records, const ShiftConfig& config);

struct GroupRates {
  double r_tp = 0.0;
  double r_tn = 0.0;
};

// R_TP(bg) - R_TP(nbg) + R_TN(nbg) - R_TN(bg). Positive means non-binary
// contexts drift negative more often.
double shift_bias_rate(GroupRates bg, GroupRates nbg);

// Maps a score pair onto {-1, 0, 1}; both unit thresholds are inclusive.
int score_pair_to_label(double s1, double s2);

// Cohen's kappa. Single-class perfect agreement (p_o = p_e = 1) returns 1.
double cohen_kappa(std::span<const int> labels_a, std::span<const int> labels_b);

std::string_view to_string(ScoreStatus status);
std::string_view to_string(ShiftClass cls);
ScoreStatus parse_score_status(std::string_view s);

}  // namespace attishift::scoring
