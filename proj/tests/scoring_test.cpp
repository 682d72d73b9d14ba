#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "attishift/error.hpp"
#include "attishift/logprob_backend.hpp"
#include "attishift/scoring.hpp"

using namespace attishift;
using namespace attishift::scoring;

namespace {

AttitudeTemplatePair en() { return builtin_templates("en"); }

std::string fixture_key(const std::string& context, const std::string& token) {
  return context + std::string(kFixtureKeySeparator) + token;
}

// Fixture backend answering the two English judgment prompts for `word`.
std::shared_ptr<FixtureLogprobBackend> pair_fixture(const std::string& word, double pos,
                                                    double neg) {
  nlohmann::json table;
  table[fixture_key("Q: Is " + word + " a positive word? A: ", "Yes")] = pos;
  table[fixture_key("Q: Is " + word + " a negative word? A: ", "Yes")] = neg;
  return std::make_shared<FixtureLogprobBackend>(table);
}

}  // namespace

TEST(Templates, RendersWordVerbatim) {
  const auto prompts = render_judgment_prompts(en(), "nice");
  EXPECT_EQ(prompts.positive_prompt, "Q: Is nice a positive word? A: Yes");
  EXPECT_EQ(prompts.negative_prompt, "Q: Is nice a negative word? A: Yes");
  EXPECT_EQ(prompts.judgment_token, "Yes");

  const auto spaced = render_judgment_prompts(en(), "well behaved");
  EXPECT_EQ(spaced.positive_prompt, "Q: Is well behaved a positive word? A: Yes");
}

TEST(Templates, ContextStopsBeforeJudgmentToken) {
  EXPECT_EQ(judgment_context("Q: Is nice a positive word? A: Yes", "Yes"),
            "Q: Is nice a positive word? A: ");
}

TEST(Templates, RejectsMalformedTemplates) {
  auto t = en();
  t.positive_template = "Q: Is it a positive word? A: Yes";
  EXPECT_THROW(render_judgment_prompts(t, "nice"), TemplateError);

  t = en();
  t.negative_template = "Q: Is [word] a [word] negative word? A: Yes";
  EXPECT_THROW(t.validate(), TemplateError);

  t = en();
  t.positive_template = "Q: Is [word] a positive word? A: Yes.";
  EXPECT_THROW(t.validate(), TemplateError);

  t = en();
  t.negative_template = "Q: Is [word] really a negative word? A: Yes";
  EXPECT_THROW(t.validate(), TemplateError);

  EXPECT_THROW(render_judgment_prompts(en(), ""), InputError);
}

TEST(Templates, BuiltinsAreValid) {
  for (const char* lang : {"en", "de", "zh"}) EXPECT_NO_THROW(builtin_templates(lang).validate());
  EXPECT_THROW(builtin_templates("xx"), TemplateError);
}

TEST(Pll, FixturePassthrough) {
  nlohmann::json table;
  table[fixture_key("Q: Is nice a positive word? A: ", "Yes")] = -0.1;
  FixtureLogprobBackend backend(table);
  EXPECT_DOUBLE_EQ(pll(backend, "Q: Is nice a positive word? A: ", "Yes"), -0.1);
}

TEST(Pll, SumsMultiplePieces) {
  nlohmann::json table;
  table[fixture_key("ctx ", "Yes")] = nlohmann::json::array({-0.2, -0.3});
  FixtureLogprobBackend backend(table);
  const double expected = -0.2 + -0.3;
  EXPECT_DOUBLE_EQ(pll(backend, "ctx ", "Yes"), expected);
  EXPECT_NEAR(pll(backend, "ctx ", "Yes"), -0.5, 1e-15);
}

TEST(Pll, EmptyPiecesIsCapabilityError) {
  nlohmann::json table;
  table[fixture_key("ctx ", "Yes")] = nlohmann::json::array();
  FixtureLogprobBackend backend(table);
  EXPECT_THROW(pll(backend, "ctx ", "Yes"), CapabilityError);
}

TEST(Pll, UnreachableEndpointReportsAttempts) {
  http::RequestOptions opts;
  opts.timeout_s = 0.5;
  opts.retries = 2;
  opts.backoff_ms = 0;
  OpenAICompletionsBackend backend("http://127.0.0.1:1/v1", "m", opts);
  try {
    pll(backend, "Q: Is nice a positive word? A: ", "Yes");
    FAIL() << "expected ScoringError";
  } catch (const ScoringError& e) {
    EXPECT_EQ(e.attempts(), 3);
  }
}

TEST(Eas, DifferenceOfPlls) {
  EXPECT_DOUBLE_EQ(eas(*pair_fixture("nice", -0.5, -1.5), en(), "nice"), 1.0);
  EXPECT_DOUBLE_EQ(eas(*pair_fixture("plain", -0.7, -0.7), en(), "plain"), 0.0);
}

TEST(Eas, LexiconBackendRecoversWord) {
  LexiconLogprobBackend::Table table;
  table["en"]["cold"] = {-1.2, -0.9};
  LexiconLogprobBackend backend({en()}, table);
  EXPECT_DOUBLE_EQ(eas(backend, en(), "cold"), -1.2 - -0.9);
  EXPECT_NEAR(eas(backend, en(), "cold"), -0.3, 1e-12);
  EXPECT_THROW(eas(backend, en(), "warm"), ScoringError);
}

TEST(Eas, AntisymmetricUnderTemplateSwap) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lp(-8.0, 0.0);
  for (int i = 0; i < 200; ++i) {
    LexiconLogprobBackend::Table table;
    const LexiconLogprobBackend::Entry entry{lp(rng), lp(rng)};
    table["en"]["w"] = entry;
    auto swapped = en().swapped();
    LexiconLogprobBackend backend({en()}, table);
    const double forward = eas(backend, en(), "w");
    const double backward = eas(backend, swapped, "w");
    EXPECT_EQ(forward, -backward);
  }
}

TEST(Eas, InvariantToCommonShift) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lp(-8.0, 0.0);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double p = lp(rng), n = lp(rng), c = shift(rng);
    EXPECT_NEAR(eas(*pair_fixture("w", p + c, n + c), en(), "w"),
                eas(*pair_fixture("w", p, n), en(), "w"), 1e-12);
  }
}

TEST(Eas, CachedScoresAreBitIdentical) {
  const auto path = std::filesystem::temp_directory_path() / "attishift_scoring_cache.jsonl";
  std::filesystem::remove(path);
  auto fixture = pair_fixture("nice", -0.123456789012345, -1.98765432109876);
  double first = 0;
  {
    auto cache = std::make_shared<ResponseCache>(path);
    CachedLogprobBackend cached(fixture, cache);
    first = eas(cached, en(), "nice");
    EXPECT_EQ(eas(cached, en(), "nice"), first);
    EXPECT_EQ(fixture->calls(), 2u);
  }
  auto cache = std::make_shared<ResponseCache>(path);
  CachedLogprobBackend reloaded(fixture, cache);
  EXPECT_EQ(eas(reloaded, en(), "nice"), first);
  EXPECT_EQ(fixture->calls(), 2u);
  EXPECT_EQ(reloaded.misses(), 0u);
  std::filesystem::remove(path);
}

TEST(Scorer, ParallelResultsKeepInputOrder) {
  LexiconLogprobBackend::Table table;
  std::vector<std::string> words;
  for (int i = 0; i < 40; ++i) {
    words.push_back("w" + std::to_string(i));
    table["en"][words.back()] = {-0.01 * i, -1.0};
  }
  words.push_back("missing");
  Scorer scorer(std::make_shared<LexiconLogprobBackend>(std::vector{en()}, table),
                {{"en", en()}}, 8);
  const auto out = scorer.eas_many("en", words);
  ASSERT_EQ(out.size(), words.size());
  for (int i = 0; i < 40; ++i) EXPECT_DOUBLE_EQ(*out[i].value, -0.01 * i + 1.0);
  EXPECT_FALSE(out.back().value);
  EXPECT_FALSE(out.back().error.empty());
  EXPECT_THROW(scorer.eas("fr", "w1"), TemplateError);
}

TEST(CorpusEas, MeanOfScores) {
  const std::vector<double> a{1.0, -1.0};
  EXPECT_DOUBLE_EQ(corpus_eas(a), 0.0);
  const std::vector<double> b{0.2510};
  EXPECT_DOUBLE_EQ(corpus_eas(b), 0.2510);
  EXPECT_THROW(corpus_eas(std::vector<double>{}), AggregationError);
}

TEST(CorpusEas, MatchesIndependentMean) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-4.0, 4.0);
  std::vector<double> scores(100);
  for (auto& s : scores) s = d(rng);
  long double sum = 0;
  for (double s : scores) sum += s;
  EXPECT_NEAR(corpus_eas(scores), static_cast<double>(sum / 100.0L), 1e-12);
}

TEST(ShiftConfigTest, RejectsNonPositiveDelta) {
  EXPECT_DOUBLE_EQ(ShiftConfig().delta(), 0.2);
  EXPECT_THROW(ShiftConfig(0.0), InputError);
  EXPECT_THROW(ShiftConfig(-0.1), InputError);
  EXPECT_THROW(ShiftConfig(std::nan("")), InputError);
}

TEST(ClassifyShift, Definition) {
  const ShiftConfig cfg(0.2);
  EXPECT_EQ(classify_shift(ShiftRecord::scored(0.5, -0.5), cfg), ShiftClass::to_negative);
  EXPECT_EQ(classify_shift(ShiftRecord::scored(0.1, -0.9), cfg), ShiftClass::stable);
  EXPECT_EQ(classify_shift(ShiftRecord::scored(-0.5, 0.5), cfg), ShiftClass::to_positive);
  EXPECT_EQ(classify_shift(ShiftRecord::scored(0.2, -0.5), cfg), ShiftClass::stable);
  EXPECT_EQ(classify_shift(ShiftRecord::unscored(0.5, ScoreStatus::copy_failure), cfg),
            ShiftClass::unscored);
  EXPECT_THROW(ShiftRecord::unscored(0.5, ScoreStatus::scored), InputError);
}

TEST(ClassifyShift, MonotoneInHypothesisScore) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  const ShiftConfig cfg(0.2);
  for (int i = 0; i < 2000; ++i) {
    const double src = d(rng);
    double lo = d(rng), hi = d(rng);
    if (lo > hi) std::swap(lo, hi);
    const auto a = classify_shift(ShiftRecord::scored(src, lo), cfg);
    const auto b = classify_shift(ShiftRecord::scored(src, hi), cfg);
    EXPECT_FALSE(a == ShiftClass::to_positive && b == ShiftClass::to_negative);
  }
}

TEST(ShiftRates, Counting) {
  const ShiftConfig cfg(0.2);
  std::vector<ShiftRecord> records{ShiftRecord::scored(0.5, -0.5), ShiftRecord::scored(0.5, 0.5),
                                   ShiftRecord::scored(-0.5, -0.5),
                                   ShiftRecord::unscored(0.3, ScoreStatus::alignment_failure)};
  const auto rates = shift_rates(records, cfg);
  EXPECT_DOUBLE_EQ(rates.r_tn, 25.0);
  EXPECT_DOUBLE_EQ(rates.r_tp, 0.0);
  EXPECT_EQ(rates.counts.unscored, 1u);
  EXPECT_EQ(rates.counts.total, 4u);

  std::vector<ShiftRecord> stable{ShiftRecord::scored(0.0, 0.0), ShiftRecord::scored(1.0, 1.0)};
  const auto zero = shift_rates(stable, cfg);
  EXPECT_EQ(zero.r_tn, 0.0);
  EXPECT_EQ(zero.r_tp, 0.0);
  EXPECT_THROW(shift_rates(std::vector<ShiftRecord>{}, cfg), AggregationError);
}

TEST(ShiftRates, MatchesBruteForceReclassification) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  std::uniform_int_distribution<int> status(0, 5);
  const ShiftConfig cfg(0.2);
  std::vector<ShiftRecord> records;
  for (int i = 0; i < 500; ++i) {
    const int s = status(rng);
    if (s == 0) records.push_back(ShiftRecord::unscored(d(rng), ScoreStatus::copy_failure));
    else records.push_back(ShiftRecord::scored(d(rng), d(rng)));
  }
  std::size_t tn = 0, tp = 0;
  for (const auto& r : records) {
    if (!r.e_hypo) continue;
    if (r.e_src > 0.2 && *r.e_hypo < -0.2) ++tn;
    if (r.e_src < -0.2 && *r.e_hypo > 0.2) ++tp;
  }
  const auto rates = shift_rates(records, cfg);
  EXPECT_EQ(rates.counts.to_negative, tn);
  EXPECT_EQ(rates.counts.to_positive, tp);
  EXPECT_EQ(rates.r_tn, 100.0 * static_cast<double>(tn) / 500.0);
  EXPECT_EQ(rates.r_tp, 100.0 * static_cast<double>(tp) / 500.0);
}

TEST(ShiftBiasRate, Definition) {
  EXPECT_DOUBLE_EQ(shift_bias_rate({2, 1}, {1, 3}), 3.0);
  EXPECT_DOUBLE_EQ(shift_bias_rate({2, 1}, {2, 1}), 0.0);
  EXPECT_DOUBLE_EQ(shift_bias_rate({1, 3}, {2, 1}), -3.0);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(0.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const GroupRates a{d(rng), d(rng)}, b{d(rng), d(rng)};
    EXPECT_EQ(shift_bias_rate(a, a), 0.0);
    EXPECT_NEAR(shift_bias_rate(a, b), -shift_bias_rate(b, a), 1e-12);
  }
}

TEST(ScorePairLabel, InclusiveThresholds) {
  EXPECT_EQ(score_pair_to_label(0.0, 1.0), -1);
  EXPECT_EQ(score_pair_to_label(1.0, 0.5), 0);
  EXPECT_EQ(score_pair_to_label(2.0, 1.0), 1);
  EXPECT_EQ(score_pair_to_label(0.3, 0.3), 0);
  EXPECT_EQ(score_pair_to_label(-0.999, 0.0), 0);
}

TEST(ScorePairLabel, AntisymmetricProperty) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = d(rng), b = d(rng);
    EXPECT_EQ(score_pair_to_label(a, b), -score_pair_to_label(b, a));
  }
}

TEST(Kappa, ClosedFormCases) {
  const std::vector<int> same{1, 0, -1, 1, 0};
  EXPECT_DOUBLE_EQ(cohen_kappa(same, same), 1.0);
  // p_o = 0.5, p_e = 0.5
  EXPECT_DOUBLE_EQ(cohen_kappa(std::vector{1, 1, 0, 0}, std::vector{1, 0, 1, 0}), 0.0);
  // p_o = 0.75, p_e = 0.75 * 0.5 + 0.25 * 0.5 = 0.5
  EXPECT_DOUBLE_EQ(cohen_kappa(std::vector{1, 1, 1, -1}, std::vector{1, 1, -1, -1}), 0.5);
  EXPECT_DOUBLE_EQ(cohen_kappa(std::vector{1, 1, 1}, std::vector{1, 1, 1}), 1.0);
  EXPECT_THROW(cohen_kappa(std::vector{1, 0}, std::vector{1}), InputError);
  EXPECT_THROW(cohen_kappa(std::vector<int>{}, std::vector<int>{}), InputError);
}

TEST(Kappa, SymmetricAndOneOnlyWhenIdentical) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> label(-1, 1);
  for (int i = 0; i < 300; ++i) {
    std::vector<int> a(12), b(12);
    for (auto& x : a) x = label(rng);
    for (auto& x : b) x = label(rng);
    EXPECT_DOUBLE_EQ(cohen_kappa(a, b), cohen_kappa(b, a));
    const bool identical = a == b;
    EXPECT_EQ(cohen_kappa(a, b) == 1.0, identical);
  }
}
