#include "attishift/scoring.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "attishift/error.hpp"
#include "attishift/parallel.hpp"
#include "attishift/text.hpp"

namespace attishift::scoring {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_space(std::string_view s) {
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c))) return true;
  return false;
}

}  // namespace

void AttitudeTemplatePair::validate() const {
  if (judgment_token.empty()) throw TemplateError("empty judgment token");
  for (const auto* tmpl : {&positive_template, &negative_template}) {
    const auto slots = text::count_occurrences(*tmpl, kWordSlot);
    if (slots != 1)
      throw TemplateError("template must contain exactly one [word] slot, found " +
                          std::to_string(slots) + ": " + *tmpl);
    if (!ends_with(*tmpl, judgment_token))
      throw TemplateError("template does not end with the judgment token '" + judgment_token +
                          "': " + *tmpl);
  }
  const std::string_view pos = positive_template;
  const std::string_view neg = negative_template;
  std::size_t prefix = 0;
  while (prefix < pos.size() && prefix < neg.size() && pos[prefix] == neg[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < pos.size() - prefix && suffix < neg.size() - prefix &&
         pos[pos.size() - 1 - suffix] == neg[neg.size() - 1 - suffix])
    ++suffix;
  const auto pos_mid = pos.substr(prefix, pos.size() - prefix - suffix);
  const auto neg_mid = neg.substr(prefix, neg.size() - prefix - suffix);
  if (pos_mid.empty() || neg_mid.empty())
    throw TemplateError("positive and negative templates must differ in a polarity word");
  if (has_space(pos_mid) || has_space(neg_mid) || pos_mid.find('[') != std::string_view::npos ||
      neg_mid.find('[') != std::string_view::npos)
    throw TemplateError("templates differ in more than the polarity word");
}

AttitudeTemplatePair AttitudeTemplatePair::swapped() const {
  return {language, negative_template, positive_template, judgment_token};
}

AttitudeTemplatePair builtin_templates(std::string_view language) {
  if (language == "en")
    return {"en", "Q: Is [word] a positive word? A: Yes", "Q: Is [word] a negative word? A: Yes",
            "Yes"};
  if (language == "de")
    return {"de", "F: Ist [word] ein positives Wort? A: Ja",
            "F: Ist [word] ein negatives Wort? A: Ja", "Ja"};
  if (language == "zh")
    return {"zh", "问：[word]是一个积极的词吗？答：是", "问：[word]是一个消极的词吗？答：是", "是"};
  throw TemplateError("no built-in judgment templates for language '" + std::string(language) +
                      "'");
}

JudgmentPrompts render_judgment_prompts(const AttitudeTemplatePair& templates,
                                        std::string_view word) {
  if (word.empty()) throw InputError("cannot render judgment prompts for an empty word");
  templates.validate();
  return {text::replace_all(templates.positive_template, kWordSlot, word),
          text::replace_all(templates.negative_template, kWordSlot, word),
          templates.judgment_token};
}

std::string judgment_context(std::string_view prompt, std::string_view judgment_token) {
  if (!ends_with(prompt, judgment_token))
    throw TemplateError("prompt does not end with the judgment token");
  return std::string(prompt.substr(0, prompt.size() - judgment_token.size()));
}

double pll(LogprobBackend& backend, const std::string& context, const std::string& judgment_token) {
  const auto pieces = backend.continuation_logprobs(context, judgment_token);
  if (pieces.empty())
    throw CapabilityError("backend " + backend.model_id() + " returned no logprobs for '" +
                          judgment_token + "'");
  double sum = 0.0;
  for (double lp : pieces) {
    if (!std::isfinite(lp))
      throw CapabilityError("backend " + backend.model_id() + " returned a non-finite logprob");
    sum += lp;
  }
  return sum;
}

double eas(LogprobBackend& backend, const AttitudeTemplatePair& templates, std::string_view word) {
  const auto prompts = render_judgment_prompts(templates, word);
  const double positive =
      pll(backend, judgment_context(prompts.positive_prompt, prompts.judgment_token),
          prompts.judgment_token);
  const double negative =
      pll(backend, judgment_context(prompts.negative_prompt, prompts.judgment_token),
          prompts.judgment_token);
  return positive - negative;
}

Scorer::Scorer(std::shared_ptr<LogprobBackend> backend,
               std::map<std::string, AttitudeTemplatePair> templates, std::size_t max_parallel)
    : backend_(std::move(backend)), max_parallel_(max_parallel == 0 ? 1 : max_parallel) {
  if (!backend_) throw ConfigError("scorer requires a logprob backend");
  for (auto& [lang, tmpl] : templates) {
    tmpl.validate();
    templates_.emplace(lang, std::move(tmpl));
  }
}

const AttitudeTemplatePair& Scorer::templates(std::string_view language) const {
  auto it = templates_.find(language);
  if (it == templates_.end())
    throw TemplateError("no judgment templates configured for language '" +
                        std::string(language) + "'");
  return it->second;
}

double Scorer::eas(std::string_view language, std::string_view word) const {
  return scoring::eas(*backend_, templates(language), word);
}

std::vector<Scorer::Outcome> Scorer::eas_many(std::string_view language,
                                              const std::vector<std::string>& words) const {
  const auto& tmpl = templates(language);
  std::vector<Outcome> out(words.size());
  parallel_for(words.size(), max_parallel_, [&](std::size_t i) {
    try {
      out[i].value = scoring::eas(*backend_, tmpl, words[i]);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

double corpus_eas(std::span<const double> scores) {
  if (scores.empty()) throw AggregationError("corpus EAS of an empty score list is undefined");
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

ShiftConfig::ShiftConfig(double delta) : delta_(delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InputError("shift threshold delta must be a finite positive number");
}

ShiftRecord ShiftRecord::unscored(double e_src, ScoreStatus status) {
  if (status == ScoreStatus::scored)
    throw InputError("an unscored record needs a failure status");
  return {e_src, std::nullopt, status};
}

ShiftClass classify_shift(const ShiftRecord& record, const ShiftConfig& config) {
  if (record.status != ScoreStatus::scored || !record.e_hypo) return ShiftClass::unscored;
  const double d = config.delta();
  const double hypo = *record.e_hypo;
  if (record.e_src > d && hypo < -d) return ShiftClass::to_negative;
  if (record.e_src < -d && hypo > d) return ShiftClass::to_positive;
  return ShiftClass::stable;
}

ShiftRates shift_rates(std::span<const ShiftRecord> records, const ShiftConfig& config) {
  if (records.empty()) throw AggregationError("shift rates of an empty record list are undefined");
  ShiftRates rates;
  for (const auto& r : records) {
    switch (classify_shift(r, config)) {
      case ShiftClass::to_negative: ++rates.counts.to_negative; break;
      case ShiftClass::to_positive: ++rates.counts.to_positive; break;
      case ShiftClass::stable: ++rates.counts.stable; break;
      case ShiftClass::unscored: ++rates.counts.unscored; break;
    }
  }
  rates.counts.total = records.size();
  const auto n = static_cast<double>(records.size());
  rates.r_tn = 100.0 * static_cast<double>(rates.counts.to_negative) / n;
  rates.r_tp = 100.0 * static_cast<double>(rates.counts.to_positive) / n;
  return rates;
}

double shift_bias_rate(GroupRates bg, GroupRates nbg) {
  return bg.r_tp - nbg.r_tp + nbg.r_tn - bg.r_tn;
}

int score_pair_to_label(double s1, double s2) {
  const double diff = s1 - s2;
  if (diff <= -1.0) return -1;
  if (diff >= 1.0) return 1;
  return 0;
}

double cohen_kappa(std::span<const int> labels_a, std::span<const int> labels_b) {
  if (labels_a.size() != labels_b.size())
    throw InputError("kappa label vectors differ in length (" + std::to_string(labels_a.size()) +
                     " vs " + std::to_string(labels_b.size()) + ")");
  if (labels_a.empty()) throw InputError("kappa of empty label vectors is undefined");
  std::map<int, std::size_t> count_a;
  std::map<int, std::size_t> count_b;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    ++count_a[labels_a[i]];
    ++count_b[labels_b[i]];
    if (labels_a[i] == labels_b[i]) ++agree;
  }
  const auto n = static_cast<double>(labels_a.size());
  const double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (const auto& [label, ca] : count_a) {
    auto it = count_b.find(label);
    if (it != count_b.end())
      p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
  }
  if (p_e >= 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

std::string_view to_string(ScoreStatus status) {
  switch (status) {
    case ScoreStatus::scored: return "scored";
    case ScoreStatus::copy_failure: return "copy_failure";
    case ScoreStatus::alignment_failure: return "alignment_failure";
  }
  return "unknown";
}

std::string_view to_string(ShiftClass cls) {
  switch (cls) {
    case ShiftClass::to_negative: return "to_negative";
    case ShiftClass::to_positive: return "to_positive";
    case ShiftClass::stable: return "stable";
    case ShiftClass::unscored: return "unscored";
  }
  return "unknown";
}

ScoreStatus parse_score_status(std::string_view s) {
  if (s == "scored") return ScoreStatus::scored;
  if (s == "copy_failure") return ScoreStatus::copy_failure;
  if (s == "alignment_failure") return ScoreStatus::alignment_failure;
  throw InputError("unknown score status '" + std::string(s) + "'");
}

}  // namespace attishift::scoring
