#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "attishift/error.hpp"
#include "attishift/pipeline.hpp"

namespace {

namespace ap = attishift::pipeline;

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kPartial = 3 };

struct Common {
  std::string config;
  std::vector<std::string> sets;
  bool moral = false;
  bool lexical = false;
  bool allow_partial = false;
  std::optional<std::size_t> parallel;
  std::optional<std::string> output_dir;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "Override a configuration field, e.g. translator.model=gpt-4o")
      ->take_all();
  cmd->add_flag("--moral", c.moral, "Prepend the moral constraint to translation prompts");
  cmd->add_flag("--lexical", c.lexical, "Prepend the identity-term glossary to translation prompts");
  cmd->add_flag("--allow-partial", c.allow_partial, "Exit 0 even when some items failed");
  cmd->add_option("--parallel", c.parallel, "Maximum concurrent backend requests")
      ->check(CLI::PositiveNumber);
  cmd->add_option("-o,--output-dir", c.output_dir, "Stage output directory");
  cmd->add_option("--delta", c.delta, "Attitude shift threshold");
  cmd->add_option("--seed", c.seed, "Seed for randomized fixtures");
}

std::vector<std::string> overrides(const Common& c) {
  auto out = c.sets;
  if (c.moral) out.push_back("constraints.moral=true");
  if (c.lexical) out.push_back("constraints.lexical=true");
  if (c.allow_partial) out.push_back("allow_partial=true");
  if (c.parallel) out.push_back("parallel=" + std::to_string(*c.parallel));
  if (c.output_dir)
    out.push_back("output_dir=" + nlohmann::json(std::filesystem::absolute(*c.output_dir).string()).dump());
  if (c.delta) out.push_back("delta=" + nlohmann::json(*c.delta).dump());
  if (c.seed) out.push_back("seed=" + std::to_string(*c.seed));
  return out;
}

int finish(const ap::StageResult& r, bool allow_partial, const std::string& stage) {
  if (r.problems.empty()) return kOk;
  const std::size_t shown = std::min<std::size_t>(r.problems.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& p = r.problems[i];
    spdlog::warn("{}: {}{}{}: {}", p.stage, p.id, p.identity.empty() ? "" : "/", p.identity, p.reason);
  }
  if (shown < r.problems.size())
    spdlog::warn("{} more problems; see the stage's problems.jsonl", r.problems.size() - shown);
  if (allow_partial) {
    spdlog::warn("{}: {} items skipped (--allow-partial)", stage, r.problems.size());
    return kOk;
  }
  spdlog::error("{}: {} items failed; rerun with --allow-partial to accept", stage, r.problems.size());
  return kPartial;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const attishift::ConfigError& e) {
    spdlog::error("configuration: {}", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("attishift");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);

  CLI::App app{"Attitude-shift bias evaluation for machine translation"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress");

  Common common;
  struct Stage {
    const char* name;
    const char* help;
    ap::StageResult (*run)(ap::Context&);
  };
  const Stage stages[] = {
      {"expand", "Realize the slotted corpus for every identity profile", ap::cmd_expand},
      {"translate", "Translate every realized source sentence", ap::cmd_translate},
      {"score", "Extract tracked-word translations and score their attitudes", ap::cmd_score},
      {"report", "Aggregate shift records into the bias report", ap::cmd_report},
      {"run", "All four stages in one process", ap::cmd_run},
  };
  std::vector<std::pair<CLI::App*, const Stage*>> stage_cmds;
  for (const auto& s : stages) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, common);
    stage_cmds.emplace_back(cmd, &s);
  }

  auto* seeds = app.add_subcommand("seeds", "Scan candidate words and keep the ambiguous ones");
  add_common(seeds, common);

  std::string kappa_a;
  std::string kappa_b;
  auto* kappa = app.add_subcommand("kappa", "Cohen's kappa between two label files");
  kappa->add_option("first", kappa_a, "CSV with id and label (or s1,s2) columns")
      ->required()
      ->check(CLI::ExistingFile);
  kappa->add_option("second", kappa_b, "CSV with id and label (or s1,s2) columns")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);
  auto warn = [](const std::string& m) { spdlog::warn("{}", m); };
  auto info = [](const std::string& m) { spdlog::info("{}", m); };

  if (kappa->parsed()) {
    return guarded([&] {
      const auto k = ap::cmd_kappa(kappa_a, kappa_b);
      std::printf("kappa\t%.6f\titems\t%zu\n", k.kappa, k.items);
      return static_cast<int>(kOk);
    });
  }

  return guarded([&] {
    ap::Context ctx(ap::load_config(common.config, overrides(common)), warn, info);
    const bool partial = ctx.config.allow_partial;
    if (seeds->parsed()) {
      const auto r = ap::cmd_seeds(ctx);
      for (const auto& w : r.seeds) std::cout << w << '\n';
      return finish(r.stage, partial, "seeds");
    }
    for (const auto& [cmd, stage] : stage_cmds)
      if (cmd->parsed()) return finish(stage->run(ctx), partial, stage->name);
    return static_cast<int>(kFailed);
  });
}
