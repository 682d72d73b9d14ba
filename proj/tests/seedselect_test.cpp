#include <gtest/gtest.h>

#include <sstream>

#include "attishift/error.hpp"
#include "attishift/fixture.hpp"
#include "attishift/logprob_backend.hpp"
#include "attishift/seedselect.hpp"

using namespace attishift;
using namespace attishift::seedselect;

namespace {

const IdentityProfile& profile(const std::string& key) {
  static const auto profiles = default_profiles();
  return *find_profile(profiles, key);
}

std::shared_ptr<scoring::Scorer> lexicon_scorer(scoring::LexiconLogprobBackend::Table table) {
  const auto en = scoring::builtin_templates("en");
  const auto zh = scoring::builtin_templates("zh");
  auto backend = std::make_shared<scoring::LexiconLogprobBackend>(
      std::vector<scoring::AttitudeTemplatePair>{en, zh}, std::move(table));
  return std::make_shared<scoring::Scorer>(
      backend, std::map<std::string, scoring::AttitudeTemplatePair>{{"en", en}, {"zh", zh}}, 4);
}

struct Scan {
  fixture::SeedFixture fx;
  std::vector<IdentityProfile> profiles;
  std::shared_ptr<scoring::Scorer> scorer;
  align::Lexicon lexicon;
  mt::FixtureTranslator translator;
  ScanResult result;

  Scan(std::size_t total, std::size_t in_band, std::vector<IdentityProfile> ps)
      : fx(fixture::seed_fixture(total, in_band, -2.5, 0.8, ps, 3)),
        profiles(std::move(ps)),
        scorer(lexicon_scorer(fx.scorer)),
        translator(fx.translations) {
    for (const auto& [s, t] : fx.lexicon) lexicon.add(s, t);
    ScanBackends b;
    b.translator = &translator;
    b.prompt = mt::make_prompt_spec(false, false, b.languages);
    b.batch = {4, nullptr};
    b.scorer = scorer.get();
    b.lexicon = &lexicon;
    result = pre_post_scan(normalize_candidates(fx.candidates), profiles, b);
  }
};

}  // namespace

TEST(SeedTemplate, AgreementAndArticle) {
  EXPECT_EQ(fill_seed_template("nice", profile("man")), "He is a nice man.");
  EXPECT_EQ(fill_seed_template("honest", profile("woman")), "She is a honest woman.");
  EXPECT_EQ(fill_seed_template("odd", profile("woman")), "She is an odd woman.");
  EXPECT_EQ(fill_seed_template("nice", profile("person")), "They are a nice person.");
  EXPECT_EQ(fill_seed_template("cunning", profile("trans_man")), "He is a cunning trans man.");
}

TEST(Candidates, NormalizeTrimsLowercasesDedupes) {
  const auto c = normalize_candidates({"  Cunning ", "", "cunning", "Bold\r", "bold"}, "list");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].surface, "cunning");
  EXPECT_EQ(c[1].surface, "bold");
  EXPECT_EQ(c[0].source_list, "list");
}

TEST(Band, InclusiveAndValidated) {
  AmbiguityBand band;
  EXPECT_TRUE(band.contains(-2.5));
  EXPECT_TRUE(band.contains(0.8));
  EXPECT_FALSE(band.contains(0.8000001));
  AmbiguityBand bad{1.0, 1.0};
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Filter, StableOnSourceScoreOnly) {
  std::vector<ScoredWordPair> pairs{{{"a", ""}, 1.0, {}},
                                    {{"b", ""}, -2.5, {}},
                                    {{"c", ""}, 0.0, {{"man", "", std::nullopt, std::nullopt, 9.0, ContextStatus::ok}}},
                                    {{"d", ""}, -3.0, {}}};
  const auto kept = ambiguity_filter(pairs, {});
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].surface, "b");
  EXPECT_EQ(kept[1].surface, "c");
}

TEST(Scan, ScoresEveryContext) {
  const std::vector<IdentityProfile> ps{profile("man"), profile("woman"), profile("queer")};
  Scan scan(40, 15, ps);
  ASSERT_EQ(scan.result.pairs.size(), 40u);
  EXPECT_TRUE(scan.result.failures.empty());
  for (const auto& p : scan.result.pairs) {
    ASSERT_EQ(p.contexts.size(), 3u);
    for (const auto& c : p.contexts) {
      EXPECT_EQ(c.status, ContextStatus::ok) << c.sentence;
      EXPECT_TRUE(c.e_translation);
    }
  }
  const auto kept = ambiguity_filter(scan.result.pairs, {});
  ASSERT_EQ(kept.size(), 15u);
  for (std::size_t i = 0; i < kept.size(); ++i) EXPECT_EQ(kept[i].surface, scan.fx.in_band[i]);
}

TEST(Scan, MissingTranslationsAreRecorded) {
  const std::vector<IdentityProfile> ps{profile("man")};
  auto fx = fixture::seed_fixture(5, 2, -2.5, 0.8, ps, 1);
  fx.translations.erase(fill_seed_template(fx.candidates[0], ps[0]));
  auto table = fx.scorer;
  table["en"].erase(fx.candidates[1]);
  auto scorer = lexicon_scorer(table);
  align::Lexicon lex;
  for (const auto& [s, t] : fx.lexicon) lex.add(s, t);
  mt::FixtureTranslator tr(fx.translations);
  ScanBackends b;
  b.translator = &tr;
  b.prompt = mt::make_prompt_spec(false, false, b.languages);
  b.batch = {1, nullptr};
  b.scorer = scorer.get();
  b.lexicon = &lex;
  const auto r = pre_post_scan(normalize_candidates(fx.candidates), ps, b);
  EXPECT_EQ(r.pairs.size(), 4u);
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.pairs[0].contexts[0].status, ContextStatus::translation_failed);
}

TEST(Scan, CsvLayout) {
  std::vector<ScoredWordPair> pairs{
      {{"sly, odd", ""}, -1.25, {{"man", "He is a sly man.", "他", "狡", 0.5, ContextStatus::ok},
                               {"woman", "", std::nullopt, std::nullopt, std::nullopt, ContextStatus::copy_failure}}}};
  std::ostringstream out;
  write_scan_csv(out, pairs);
  EXPECT_EQ(out.str(),
            "word,e_source,context,e_translation,status\n"
            "\"sly, odd\",-1.25,man,0.5,ok\n"
            "\"sly, odd\",-1.25,woman,,copy_failure\n");
}
