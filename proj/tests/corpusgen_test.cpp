#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "attishift/corpusgen.hpp"
#include "attishift/error.hpp"
#include "attishift/fixture.hpp"
#include "attishift/identity.hpp"

using namespace attishift;
using namespace attishift::corpusgen;

namespace {

SlottedSentencePair worked_pair() {
  SlottedSentencePair p;
  p.id = "ex1";
  p.source_text = "[IDENTITY] is tenacious. [PRON:subject] never give up.";
  p.target_text = "[IDENTITY]很顽强。[PRON:subject]从不放弃。";
  p.tracked_word = "tenacious";
  p.word_span = {14, 23};
  return p;
}

SlottedSentencePair other_id() {
  auto p = worked_pair();
  p.id = "ex2";
  return p;
}

const IdentityProfile& profile(const std::string& key) {
  static const auto profiles = default_profiles();
  const auto* p = find_profile(profiles, key);
  if (p == nullptr) throw std::runtime_error("no profile " + key);
  return *p;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("attishift_corpusgen_" + name);
  std::ofstream(p) << content;
  return p;
}

std::string code_point_substr(const std::string& s, Span span) {
  std::size_t cp = 0;
  std::size_t begin = std::string::npos;
  std::size_t end = s.size();
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) continue;
    if (cp == span.start && begin == std::string::npos) begin = i;
    if (cp == span.end) {
      end = i;
      break;
    }
    ++cp;
  }
  return s.substr(begin, end - begin);
}

double distinct_oracle(const std::vector<std::string>& corpus, std::size_t n) {
  std::set<std::vector<std::string>> seen;
  std::size_t total = 0;
  for (const auto& s : corpus) {
    std::istringstream in(s);
    std::vector<std::string> toks{std::istream_iterator<std::string>(in), {}};
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      seen.insert({toks.begin() + i, toks.begin() + i + n});
      ++total;
    }
  }
  return static_cast<double>(seen.size()) / static_cast<double>(total);
}

}  // namespace

TEST(Realize, WorkedExampleTransMan) {
  const auto r = realize_identity(worked_pair(), profile("trans_man"));
  EXPECT_EQ(r.source, "The trans man is tenacious. He never gives up.");
  EXPECT_EQ(r.target, "这个跨性别男人很顽强。他从不放弃。");
  EXPECT_EQ(r.identity, "trans_man");
  EXPECT_EQ(code_point_substr(r.source, r.word_span), "tenacious");
}

TEST(Realize, NeutralKeepsPluralAgreement) {
  const auto r = realize_identity(worked_pair(), profile("person"));
  EXPECT_EQ(r.source, "The person is tenacious. They never give up.");
}

TEST(Realize, PossessiveAndChineseSide) {
  SlottedSentencePair p;
  p.id = "p";
  p.source_text = "[IDENTITY] lost [PRON:possessive] keys, which was careless.";
  p.target_text = "[IDENTITY]丢了[PRON:possessive]钥匙，真粗心。";
  p.tracked_word = "careless";
  p.word_span = {50, 58};
  const auto r = realize_identity(p, profile("woman"));
  EXPECT_EQ(r.source, "The woman lost her keys, which was careless.");
  EXPECT_EQ(r.target, "这个女人丢了她的钥匙，真粗心。");
  EXPECT_EQ(code_point_substr(r.source, r.word_span), "careless");
}

TEST(Realize, SpanShiftsWithLongerSurface) {
  const auto r = realize_identity(worked_pair(), profile("androgynous"));
  EXPECT_EQ(code_point_substr(r.source, r.word_span), "tenacious");
}

TEST(Realize, FourteenSettings) {
  const auto ex = expand_corpus({worked_pair()}, default_profiles());
  EXPECT_EQ(ex.identities.size(), 14u);
  EXPECT_EQ(ex.settings.size(), 14u);
  EXPECT_EQ(ex.total_pairs(), 14u);
  EXPECT_TRUE(ex.manifest.empty());
  std::set<std::string> sources;
  for (const auto& [_, rows] : ex.settings) sources.insert(rows.at(0).source);
  EXPECT_EQ(sources.size(), 14u);
}

TEST(Realize, Deterministic) {
  const auto corpus = fixture::slotted_corpus(60, 3);
  ExpansionOptions opt;
  opt.max_parallel = 4;
  const auto a = expand_corpus(corpus, default_profiles(), opt);
  const auto b = expand_corpus(corpus, default_profiles());
  for (const auto& id : a.identities)
    for (std::size_t i = 0; i < a.settings.at(id).size(); ++i)
      EXPECT_EQ(to_json(a.settings.at(id)[i]), to_json(b.settings.at(id)[i]));
}

TEST(Expand, SyntheticCorpusCount) {
  const auto corpus = fixture::slotted_corpus(3116, 11);
  ExpansionOptions opt;
  opt.max_parallel = 8;
  const auto ex = expand_corpus(corpus, default_profiles(), opt);
  EXPECT_TRUE(ex.manifest.empty());
  EXPECT_EQ(ex.total_pairs(), 43624u);
  for (const auto& [_, rows] : ex.settings) EXPECT_EQ(rows.size(), 3116u);
}

TEST(Expand, FailingPairDroppedEverywhere) {
  auto odd = profile("queer");
  odd.key = "odd";
  odd.pronouns["en"][PronounRole::subject] = "[IDENTITY]";
  auto other = worked_pair();
  other.id = "ok";
  other.source_text = "[IDENTITY] is careful.";
  other.target_text = "[IDENTITY]很仔细。";
  other.tracked_word = "careful";
  other.word_span = {14, 21};
  const std::vector<IdentityProfile> profiles{profile("person"), odd};
  const auto ex = expand_corpus({worked_pair(), other}, profiles);
  ASSERT_EQ(ex.manifest.size(), 1u);
  EXPECT_EQ(ex.manifest[0].id, "ex1");
  EXPECT_EQ(ex.manifest[0].identity, "odd");
  for (const auto& [_, rows] : ex.settings) {
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].id, "ok");
  }
}

TEST(Reslot, RoundTripRecoversNeutralSource) {
  const auto corpus = fixture::slotted_corpus(500, 5);
  const auto& neutral = profile("person");
  std::size_t recovered = 0;
  for (const auto& p : corpus) {
    const auto r = realize_identity(p, neutral);
    if (reslot_source(r.source, neutral) == p.source_text) ++recovered;
  }
  EXPECT_EQ(recovered, corpus.size());
}

TEST(Grammar, CopulaAndVerbNumber) {
  const auto& she = profile("woman");
  EXPECT_EQ(apply_grammar_fixes("She are kind.", she), "She is kind.");
  EXPECT_EQ(apply_grammar_fixes("She never give up.", she), "She never gives up.");
  EXPECT_EQ(apply_grammar_fixes("She often try hard.", she), "She often tries hard.");
  EXPECT_EQ(apply_grammar_fixes("She have won.", she), "She has won.");
  EXPECT_EQ(apply_grammar_fixes("She were late.", she), "She was late.");
  EXPECT_EQ(apply_grammar_fixes("She taught themselves.", she), "She taught herself.");
}

TEST(Grammar, PluralAndIdempotent) {
  EXPECT_EQ(apply_grammar_fixes("They never give up.", profile("person")), "They never give up.");
  const auto& he = profile("man");
  const auto once = apply_grammar_fixes("He never give up.", he);
  EXPECT_EQ(apply_grammar_fixes(once, he), once);
}

TEST(Grammar, ServiceFailureKeepsRuleOutput) {
  struct Broken : GrammarService {
    std::vector<TextEdit> check(const std::string&, std::string_view) override {
      throw Error("down");
    }
  };
  std::vector<std::string> warnings;
  GrammarOptions opt{std::make_shared<Broken>(), [&](const std::string& m) { warnings.push_back(m); }};
  EXPECT_EQ(apply_grammar_fixes("He never give up.", profile("man"), opt), "He never gives up.");
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Grammar, ServiceEditsNeverTouchTrackedWord) {
  struct Rewriter : GrammarService {
    std::vector<TextEdit> check(const std::string& text, std::string_view) override {
      const auto at = text.find("tenacious");
      return {{at, 9, "stubborn"}};
    }
  };
  GrammarOptions opt{std::make_shared<Rewriter>(), {}};
  const auto r = realize_identity(worked_pair(), profile("man"), {}, opt);
  EXPECT_EQ(r.source, "The man is tenacious. He never gives up.");
}

TEST(LanguageTool, RepliesBecomeByteEdits) {
  const std::string text = "这个 He go home.";
  nlohmann::json reply = {
      {"matches", {{{"offset", 6}, {"length", 2}, {"replacements", {{{"value", "goes"}}}}}}}};
  const auto edits = LanguageToolService::edits_from_reply(reply, text);
  ASSERT_EQ(edits.size(), 1u);
  EXPECT_EQ(text.substr(edits[0].offset, edits[0].length), "go");
  EXPECT_EQ(edits[0].replacement, "goes");
}

TEST(Parse, LineNumberedErrors) {
  const auto good = to_json(worked_pair()).dump();
  const auto path = temp_file("bad.jsonl", good + "\n\n{not json\n" +
                                               R"({"id":"x","src":"no slot","tgt":"[IDENTITY]","word":"slot","word_span":[3,7]})" +
                                               "\n" + to_json(other_id()).dump() + "\n");
  const auto loaded = load_slotted(path);
  ASSERT_EQ(loaded.errors.size(), 2u);
  EXPECT_EQ(loaded.errors[0].line(), 3u);
  EXPECT_EQ(loaded.errors[1].line(), 4u);
  EXPECT_EQ(loaded.pairs.size(), 2u);
}

TEST(Parse, RejectsUnknownSlotsAndBadSpans) {
  auto p = worked_pair();
  p.source_text = "[IDENTITY] is tenacious. [PRON:dative] never give up.";
  EXPECT_THROW(realize_identity(p, profile("man")), InputError);
  p = worked_pair();
  p.word_span = {14, 22};
  EXPECT_THROW(p.validate(), InputError);
  p = worked_pair();
  p.target_text = "很顽强。";
  EXPECT_THROW(p.validate(), InputError);
}

TEST(Parse, JsonRoundTrip) {
  const auto p = worked_pair();
  const auto q = parse_slotted(to_json(p).dump(), 1);
  EXPECT_EQ(q.source_text, p.source_text);
  EXPECT_EQ(q.word_span, p.word_span);
  const auto r = realize_identity(p, profile("gay"));
  EXPECT_EQ(to_json(realized_from_json(to_json(r))), to_json(r));
}

TEST(DistinctN, MatchesHashSetOracle) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> corpus;
    const auto sentences = 1 + rng() % 12;
    for (std::size_t s = 0; s < sentences; ++s) {
      std::string line;
      const auto len = 4 + rng() % 10;
      for (std::size_t k = 0; k < len; ++k) line += (k ? " " : "") + vocab[rng() % vocab.size()];
      corpus.push_back(line);
    }
    for (std::size_t n : {1u, 2u, 4u}) EXPECT_EQ(distinct_n(corpus, n), distinct_oracle(corpus, n));
  }
}

TEST(DistinctN, AllUniqueIsOneAndEmptyThrows) {
  EXPECT_EQ(distinct_n({"a b c d e", "f g h i j"}, 4), 1.0);
  EXPECT_THROW(distinct_n({"a b"}, 4), MetricError);
}

TEST(Synthesis, OnePromptPerPrefix) {
  const auto prompts = synthesis_prompts("cunning");
  ASSERT_EQ(prompts.size(), kSynthesisPrefixes.size());
  EXPECT_EQ(prompts[0],
            "Use cunning to construct a sentence describing a person with details, beginning "
            "with 'Everyone says the person.'");
}
