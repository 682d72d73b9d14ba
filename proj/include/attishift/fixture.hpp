#pragma once

// Deterministic synthetic inputs for offline runs and tests: slotted corpora,
// a dictionary translator, a lexicon scorer, an aligner lexicon and a seed
// candidate list. Nothing here talks to a model.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "attishift/corpusgen.hpp"
#include "attishift/identity.hpp"
#include "attishift/logprob_backend.hpp"

namespace attishift::fixture {

struct AttitudeWord {
  std::string en;
  std::string zh;       // faithful translation
  std::string zh_flip;  // translation with the opposite attitude
  double eas_en = 0.0;
  double eas_zh = 0.0;
  double eas_flip = 0.0;
};

const std::vector<AttitudeWord>& attitude_words();
const AttitudeWord* find_word(std::string_view en);

// `n` slotted pairs cycling through sentence frames and attitude words;
// ids are "s0001", "s0002", ... Frames avoid every default pronoun and
// identity surface outside their slots, so neutral re-slotting round-trips.
std::vector<corpusgen::SlottedSentencePair> slotted_corpus(std::size_t n, std::uint64_t seed);

struct TranslatorOptions {
  std::uint64_t seed = 7;
  double bg_flip_rate = 0.05;   // attitude word replaced by its flipped sense
  double nbg_flip_rate = 0.25;
  double copy_rate = 0.03;      // English word left untranslated
};

// Source sentence -> hypothesis map for a realized corpus. The hypothesis is
// the realized target with the tracked word's translation possibly flipped
// or copied, decided per (id, identity) from the seed.
nlohmann::json translation_table(const corpusgen::ExpansionResult& expansion,
                                 const std::vector<IdentityProfile>& profiles,
                                 const TranslatorOptions& options = {});

// Judgment lexicon over every English, Chinese and flipped word, in the
// LexiconLogprobBackend file layout. Positive logprob 0, negative -eas.
scoring::LexiconLogprobBackend::Table scorer_lexicon();
nlohmann::json to_json(const scoring::LexiconLogprobBackend::Table& table);

// English word -> faithful Chinese translation.
std::vector<std::pair<std::string, std::string>> aligner_lexicon();

std::vector<std::string> stopwords_zh();

struct SeedFixture {
  std::vector<std::string> candidates;
  std::vector<std::string> in_band;  // candidates order
  scoring::LexiconLogprobBackend::Table scorer;
  nlohmann::json translations;  // seed sentence -> Chinese sentence
  std::vector<std::pair<std::string, std::string>> lexicon;
};

// `total` pseudo-words of which exactly `in_band` have a source score inside
// [lower, upper]; both bounds themselves are among the in-band scores.
SeedFixture seed_fixture(std::size_t total, std::size_t in_band, double lower, double upper,
                         const std::vector<IdentityProfile>& profiles, std::uint64_t seed);

// Chinese rendering of the seed sentence for a profile, mirroring
// "He is a nice man." -> "他是一个<zh>男人。".
std::string seed_sentence_zh(const std::string& zh_word, const IdentityProfile& profile);

struct KitOptions {
  std::size_t sentences = 50;
  std::uint64_t seed = 7;
  TranslatorOptions translator;
  std::size_t seed_candidates = 703;
  std::size_t seed_in_band = 384;
};

// Writes corpus.jsonl, profiles.json, translations.json, scorer.json,
// aligner.tsv, stopwords.txt, scores.csv, candidates.txt,
// seed_translations.json, seed_scorer.json and config.json into `dir`.
void write_kit(const std::filesystem::path& dir, const KitOptions& options = {});

}  // namespace attishift::fixture
