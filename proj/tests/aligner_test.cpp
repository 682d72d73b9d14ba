#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "attishift/aligner.hpp"
#include "attishift/error.hpp"

using namespace attishift;
using namespace attishift::align;

namespace {

// Source word i always translates to target word i; no word repeats within
// a sentence.
struct Bijective {
  std::vector<SentencePair> pairs;
  std::vector<std::size_t> tracked;
  std::vector<std::string> expected;
};

Bijective bijective_corpus(std::size_t n, std::size_t vocab, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bijective b;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t len = 3 + rng() % 6;
    SentencePair p;
    std::vector<std::size_t> ids;
    while (ids.size() < len) {
      const std::size_t w = rng() % vocab;
      if (std::find(ids.begin(), ids.end(), w) == ids.end()) ids.push_back(w);
    }
    for (auto w : ids) {
      p.first.push_back("s" + std::to_string(w));
      p.second.push_back("t" + std::to_string(w));
    }
    const std::size_t tracked = rng() % len;
    b.tracked.push_back(tracked);
    b.expected.push_back("t" + std::to_string(ids[tracked]));
    b.pairs.push_back(std::move(p));
  }
  return b;
}

std::vector<SentencePair> noisy_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SentencePair> out;
  for (std::size_t k = 0; k < n; ++k) {
    SentencePair p;
    const std::size_t ls = 2 + rng() % 8;
    const std::size_t lt = 2 + rng() % 8;
    for (std::size_t i = 0; i < ls; ++i) p.first.push_back("e" + std::to_string(rng() % 40));
    for (std::size_t j = 0; j < lt; ++j) p.second.push_back("f" + std::to_string(rng() % 40));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST(Em, ToyBijectionConverges) {
  const std::vector<SentencePair> pairs{{{"a", "b"}, {"x", "y"}}, {{"a"}, {"x"}}, {{"b", "c"}, {"y", "z"}}};
  const auto m = train_statistical_aligner(pairs, 20, {0.0});
  EXPECT_GT(m.probability("a", "x"), 0.9);
  EXPECT_GT(m.probability("b", "y"), 0.5);
  EXPECT_GT(m.probability("c", "z"), 0.5);
}

TEST(Em, SinglePairIsUniform) {
  const auto m = train_statistical_aligner({{{"a", "b"}, {"x", "y"}}}, 5, {0.0});
  EXPECT_NEAR(m.probability("a", "x"), 0.5, 1e-12);
  EXPECT_NEAR(m.probability("b", "y"), 0.5, 1e-12);
}

TEST(Em, InvalidTrainingInputs) {
  const std::vector<SentencePair> pairs{{{"a"}, {"x"}}};
  EXPECT_THROW(train_statistical_aligner(pairs, 0), TrainingError);
  EXPECT_THROW(train_statistical_aligner({}, 5), TrainingError);
  EXPECT_THROW(train_statistical_aligner({{{}, {}}}, 5), TrainingError);
  EXPECT_THROW(train_statistical_aligner(pairs, 5, {-1.0}), TrainingError);
}

TEST(Em, LogLikelihoodNonDecreasing) {
  const auto pairs = noisy_corpus(500, 9);
  for (double tension : {0.0, 4.0}) {
    const auto m = train_statistical_aligner(pairs, 20, {tension});
    ASSERT_EQ(m.log_likelihood.size(), 21u);
    for (std::size_t i = 1; i < m.log_likelihood.size(); ++i)
      EXPECT_GE(m.log_likelihood[i], m.log_likelihood[i - 1] - 1e-9 * std::abs(m.log_likelihood[i - 1]));
    EXPECT_NEAR(m.log_likelihood.back(), corpus_log_likelihood(m, pairs), 1e-6);
  }
}

TEST(Em, RowsNormalize) {
  const auto m = train_statistical_aligner(noisy_corpus(60, 2), 5);
  for (const auto& [src, row] : m.table) {
    double total = 0.0;
    for (const auto& [_, p] : row) total += p;
    EXPECT_NEAR(total, 1.0, 1e-9) << src;
  }
}

TEST(Extract, BijectiveAccuracy) {
  const auto b = bijective_corpus(500, 60, 4);
  const auto m = train_statistical_aligner(b.pairs, 10);
  ExtractionSources s;
  s.model = &m;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < b.pairs.size(); ++k) {
    const auto r = extract_target_word(s, b.pairs[k].first, b.tracked[k], b.pairs[k].second);
    if (r.target_word == b.expected[k]) ++correct;
  }
  EXPECT_GE(static_cast<double>(correct) / b.pairs.size(), 0.95);
}

TEST(Extract, CopyBeatsEverything) {
  Lexicon lex;
  lex.add("cunning", "狡猾");
  const std::vector<std::string> src{"the", "queer", "is", "cunning"};
  const std::vector<std::string> hyp{"这个", "酷儿", "很", "Cunning", "狡猾"};
  ExtractionSources s;
  s.lexicon = &lex;
  const auto r = extract_target_word(s, src, 3, hyp);
  EXPECT_EQ(r.status, ExtractionStatus::copy_failure);
  EXPECT_FALSE(r.target_word);
}

TEST(Extract, LexiconThenLinksThenModel) {
  Lexicon lex;
  lex.add("Cunning", "狡猾");
  lex.add("cunning", "聪明");
  const std::vector<std::string> src{"the", "man", "is", "cunning"};
  const std::vector<std::string> hyp{"这个", "男人", "很", "聪明", "狡猾"};
  ExtractionSources s;
  s.lexicon = &lex;
  auto r = extract_target_word(s, src, 3, hyp);
  EXPECT_EQ(r.method, ExtractionMethod::lexicon);
  EXPECT_EQ(r.target_word, "聪明");
  EXPECT_EQ(r.target_index, 3u);

  const Links links{{3, 4}, {1, 1}};
  s.lexicon = nullptr;
  s.links = &links;
  r = extract_target_word(s, src, 3, hyp);
  EXPECT_EQ(r.method, ExtractionMethod::external);
  EXPECT_EQ(r.target_word, "狡猾");

  s.links = nullptr;
  r = extract_target_word(s, src, 3, hyp);
  EXPECT_EQ(r.status, ExtractionStatus::no_alignment);
  EXPECT_THROW(extract_target_word(s, src, 4, hyp), InputError);
}

TEST(Extract, FloorRejectsWeakLinks) {
  const std::vector<SentencePair> pairs{{{"a"}, {"x", "y", "z", "w"}}};
  const auto m = train_statistical_aligner(pairs, 3, {0.0});
  ExtractionSources s;
  s.model = &m;
  s.floor = 0.5;
  EXPECT_EQ(extract_target_word(s, pairs[0].first, 0, pairs[0].second).status,
            ExtractionStatus::no_alignment);
  s.floor = 0.05;
  const auto r = extract_target_word(s, pairs[0].first, 0, pairs[0].second);
  EXPECT_EQ(r.status, ExtractionStatus::ok);
  EXPECT_EQ(r.target_index, 0u);
}

TEST(Segment, WhitespacePeelsPunctuation) {
  WhitespaceSegmenter seg;
  const std::string s = "The man, is \"cunning\".";
  const auto toks = seg.segment(s);
  EXPECT_EQ(token_texts(toks), (std::vector<std::string>{"The", "man", "is", "cunning"}));
  EXPECT_EQ(s.substr(toks[3].begin, toks[3].end - toks[3].begin), "cunning");
  EXPECT_EQ(token_at(toks, s.find("cunning") + 2), 3u);
  EXPECT_FALSE(token_at(toks, s.find(',')));
}

TEST(Segment, DictionaryMaxMatchWithBigramFallback) {
  DictionarySegmenter seg({"这个", "男人", "狡猾", "男"});
  EXPECT_EQ(token_texts(seg.segment("这个男人很狡猾。")),
            (std::vector<std::string>{"这个", "男人", "很", "狡猾"}));
  EXPECT_EQ(token_texts(seg.segment("天气晴朗")), (std::vector<std::string>{"天气", "气晴", "晴朗"}));
  EXPECT_EQ(token_texts(seg.segment("他说OK了")), (std::vector<std::string>{"他说", "OK", "了"}));
}

TEST(Pharaoh, ParsesAndRejects) {
  EXPECT_EQ(parse_pharaoh("0-1 2-0"), (Links{{0, 1}, {2, 0}}));
  EXPECT_TRUE(parse_pharaoh("").empty());
  EXPECT_THROW(parse_pharaoh("0-x"), InputError);
}

TEST(External, CommandOutputBecomesLinks) {
  ExternalAligner a("sed 's/.*/0-0 1-1/'");
  const auto links = a.align({{{"a", "b"}, {"x", "y"}}, {{"c"}, {"z"}}});
  ASSERT_EQ(links.size(), 2u);
  EXPECT_EQ(links[0], (Links{{0, 0}, {1, 1}}));
}
