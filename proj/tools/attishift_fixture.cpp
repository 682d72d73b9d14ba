#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "attishift/fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a self-contained offline fixture kit"};
  std::string dir;
  attishift::fixture::KitOptions opt;
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--sentences", opt.sentences, "Slotted sentence pairs")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "Fixture seed");
  app.add_option("--candidates", opt.seed_candidates, "Seed candidate words");
  app.add_option("--in-band", opt.seed_in_band, "Candidates placed inside the ambiguity band");
  CLI11_PARSE(app, argc, argv);
  opt.translator.seed = opt.seed;
  try {
    attishift::fixture::write_kit(dir, opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::printf("%s/config.json\n", dir.c_str());
  return 0;
}
