#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "attishift/error.hpp"
#include "attishift/fixture.hpp"
#include "attishift/pipeline.hpp"

using namespace attishift;
using namespace attishift::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("attishift_pipeline_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path kit(const std::string& name, fixture::KitOptions opt = {}) {
  const auto d = fresh_dir(name);
  opt.seed_candidates = 40;
  opt.seed_in_band = 10;
  fixture::write_kit(d, opt);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

RunConfig config(const fs::path& dir, std::vector<std::string> overrides = {}) {
  return load_config(dir / "config.json", overrides);
}

const char* const kReportFiles[] = {"report.json", "report.txt", "identities.csv", "groups.csv",
                                    "scatter.csv"};

int cli(const std::string& args) {
  const int rc = std::system((std::string(ATTISHIFT_CLI) + " " + args + " 2>/dev/null >/dev/null").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Config, OverridesAndValidation) {
  const auto dir = kit("config");
  auto c = config(dir, {"delta=0.5", "translator.beam_size=2", "constraints.moral=true"});
  EXPECT_EQ(c.delta, 0.5);
  EXPECT_EQ(c.translator.decoding.beam_size, 2);
  EXPECT_TRUE(c.moral);
  EXPECT_EQ(c.corpus, dir / "corpus.jsonl");
  EXPECT_THROW(config(dir, {"delta=0"}), ConfigError);
  EXPECT_THROW(config(dir, {"band.lower=1", "band.upper=0"}), ConfigError);
  EXPECT_THROW(config(dir, {"colour=blue"}), ConfigError);
  EXPECT_THROW(config(dir, {"corpus=missing.jsonl"}), ConfigError);
  EXPECT_THROW(config(dir, {"scorer.kind=lexicon", "scorer.path=null"}), ConfigError);
}

TEST(Expand, OnePairFourteenFiles) {
  const auto dir = kit("one", {.sentences = 1});
  Context ctx(config(dir));
  EXPECT_TRUE(cmd_expand(ctx).problems.empty());
  for (const auto& p : ctx.profiles) EXPECT_EQ(lines(ctx.stage_dir("expanded") / (p.key + ".jsonl")), 1u);
  EXPECT_EQ(ctx.profiles.size(), 14u);
}

TEST(Expand, MalformedLineReportedWithLineNumber) {
  const auto dir = kit("malformed", {.sentences = 3});
  std::ofstream(dir / "corpus.jsonl", std::ios::app) << "{broken\n";
  Context ctx(config(dir));
  const auto r = cmd_expand(ctx);
  ASSERT_EQ(r.problems.size(), 1u);
  EXPECT_NE(r.problems[0].reason.find("line 4"), std::string::npos);
  EXPECT_FALSE(r.ok(false));
  EXPECT_TRUE(r.ok(true));
  EXPECT_EQ(cli("expand -c " + (dir / "config.json").string()), 3);
  EXPECT_EQ(cli("expand --allow-partial -c " + (dir / "config.json").string()), 0);
}

TEST(Expand, RerunIsByteIdentical) {
  const auto dir = kit("rerun", {.sentences = 8});
  Context a(config(dir));
  cmd_expand(a);
  const auto first = slurp(a.stage_dir("expanded") / "queer.jsonl");
  Context b(config(dir));
  cmd_expand(b);
  EXPECT_EQ(slurp(b.stage_dir("expanded") / "queer.jsonl"), first);
}

TEST(Score, MissingScorerFailsBeforeWork) {
  const auto dir = kit("noscorer", {.sentences = 2});
  auto c = config(dir, {"scorer=null"});
  Context ctx(c);
  EXPECT_THROW(cmd_run(ctx), ConfigError);
  EXPECT_FALSE(fs::exists(ctx.stage_dir("expanded")));
  EXPECT_EQ(cli("run --set scorer=null -c " + (dir / "config.json").string()), 2);
}

TEST(Score, CopyFailuresCarryNoTranslationScore) {
  fixture::KitOptions opt;
  opt.sentences = 20;
  opt.translator.copy_rate = 0.5;
  const auto dir = kit("copy", opt);
  Context ctx(config(dir));
  ASSERT_TRUE(cmd_run(ctx).problems.empty());
  std::size_t copies = 0;
  std::ifstream in(ctx.stage_dir("records") / "gay.jsonl");
  for (std::string line; std::getline(in, line);) {
    auto r = metrics::tracked_from_json(nlohmann::json::parse(line));
    if (r.shift.status == scoring::ScoreStatus::copy_failure) {
      ++copies;
      EXPECT_FALSE(r.shift.e_hypo);
    }
  }
  EXPECT_GT(copies, 0u);
}

TEST(Score, LexiconCoveredFixtureScoresEverything) {
  fixture::KitOptions opt;
  opt.sentences = 20;
  opt.translator.copy_rate = 0.0;
  const auto dir = kit("covered", opt);
  Context ctx(config(dir, {"aligner.statistical=false"}));
  ASSERT_TRUE(cmd_run(ctx).problems.empty());
  const auto rep = nlohmann::json::parse(slurp(ctx.stage_dir("report") / "report.json"));
  for (const auto& row : rep["identities"]) EXPECT_EQ(row["scored"], row["records"]) << row["identity"];
}

TEST(Run, DeterministicAndEqualToStagedRun) {
  const auto dir = kit("determinism");
  Context one(config(dir, {"output_dir=run1"}));
  ASSERT_TRUE(cmd_run(one).problems.empty());
  Context two(config(dir, {"output_dir=run2", "cache=null"}));
  ASSERT_TRUE(cmd_run(two).problems.empty());
  Context staged(config(dir, {"output_dir=staged", "cache=staged/cache.jsonl"}));
  for (auto* stage : {cmd_expand, cmd_translate, cmd_score, cmd_report})
    ASSERT_TRUE(stage(staged).problems.empty());
  for (const char* f : kReportFiles) {
    const auto ref = slurp(one.stage_dir("report") / f);
    EXPECT_FALSE(ref.empty());
    EXPECT_EQ(slurp(two.stage_dir("report") / f), ref) << f;
    EXPECT_EQ(slurp(staged.stage_dir("report") / f), ref) << f;
  }
}

TEST(Run, ReportCarriesHeadlineFields) {
  const auto dir = kit("fields", {.sentences = 12});
  Context ctx(config(dir));
  cmd_run(ctx);
  const auto rep = nlohmann::json::parse(slurp(ctx.stage_dir("report") / "report.json"));
  ASSERT_EQ(rep["groups"].size(), 2u);
  EXPECT_EQ(rep["groups"][0]["group"], "BG");
  EXPECT_TRUE(rep["groups"][0].contains("eas_translation"));
  EXPECT_TRUE(rep["groups"][1].contains("r_tn"));
  EXPECT_TRUE(rep.contains("shift_bias_rate"));
  EXPECT_EQ(rep["identities"].size(), 14u);
  EXPECT_TRUE(rep["cross_identity"].contains("comet"));
}

TEST(Translate, ResumeAfterInterruptionUsesFewerCalls) {
  const auto dir = kit("resume", {.sentences = 10});
  Context full(config(dir, {"output_dir=full", "cache=null"}));
  cmd_expand(full);
  cmd_translate(full);
  const auto total = dynamic_cast<mt::FixtureTranslator&>(*full.translator()).calls();

  Context first(config(dir, {"output_dir=part"}));
  cmd_expand(first);
  cmd_translate(first);
  // keep the first third of the cache, as an interrupted run would
  const auto cache = first.config.cache;
  const auto text = slurp(cache);
  std::size_t cut = 0;
  for (std::size_t n = 0; n < total / 3; ++n) cut = text.find('\n', cut) + 1;
  first.cache.reset();
  std::ofstream(cache, std::ios::binary | std::ios::trunc) << text.substr(0, cut) << "{\"k\":\"torn";

  Context resumed(config(dir, {"output_dir=part"}));
  cmd_translate(resumed);
  const auto calls = dynamic_cast<mt::FixtureTranslator&>(*resumed.translator()).calls();
  EXPECT_EQ(calls, total - total / 3);
  for (const auto& p : full.profiles)
    EXPECT_EQ(slurp(resumed.stage_dir("translations") / (p.key + ".jsonl")),
              slurp(full.stage_dir("translations") / (p.key + ".jsonl")));
}

TEST(Report, MissingIdentityInScoreTableIsNamed) {
  const auto dir = kit("gap", {.sentences = 4});
  Context ctx(config(dir));
  cmd_expand(ctx);
  cmd_translate(ctx);
  cmd_score(ctx);
  std::ofstream(dir / "scores.csv", std::ios::trunc) << "segment_id,identity,metric,value\ns0001,man,comet,0.5\n";
  try {
    cmd_report(ctx);
    FAIL();
  } catch (const AggregationError& e) {
    EXPECT_NE(std::string(e.what()).find("queer"), std::string::npos);
  }
}

TEST(Seeds, KeepsBandWords) {
  const auto dir = kit("seeds");
  Context ctx(config(dir));
  const auto r = cmd_seeds(ctx);
  EXPECT_EQ(r.seeds.size(), 10u);
  EXPECT_EQ(lines(ctx.stage_dir("seeds") / "seeds.txt"), 10u);
  EXPECT_EQ(lines(ctx.stage_dir("seeds") / "scan.csv"), 1u + 40u * 14u);
}

TEST(Kappa, LabelsAndScorePairs) {
  const auto d = fresh_dir("kappa");
  std::ofstream(d / "a.csv") << "id,label\n1,1\n2,0\n3,-1\n4,1\n";
  std::ofstream(d / "b.csv") << "id,s1,s2\n4,3,1\n3,0,1\n2,0.5,0\n1,2,1\n";
  const auto k = cmd_kappa(d / "a.csv", d / "b.csv");
  EXPECT_EQ(k.items, 4u);
  EXPECT_DOUBLE_EQ(k.kappa, 1.0);
  std::ofstream(d / "c.csv") << "id,label\n1,1\n";
  EXPECT_THROW(cmd_kappa(d / "a.csv", d / "c.csv"), InputError);
}
