#include "attishift/seedselect.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "attishift/csv.hpp"
#include "attishift/text.hpp"

namespace attishift::seedselect {

std::vector<CandidateWord> normalize_candidates(const std::vector<std::string>& raw,
                                                const std::string& source_list) {
  std::vector<CandidateWord> out;
  std::set<std::string> seen;
  for (const auto& r : raw) {
    std::string w = text::to_lower_ascii(text::trim(r));
    if (w.empty() || !seen.insert(w).second) continue;
    out.push_back({std::move(w), source_list});
  }
  return out;
}

std::vector<CandidateWord> load_candidates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open candidate words " + path.string());
  std::vector<std::string> raw;
  std::string line;
  while (std::getline(in, line)) raw.push_back(line);
  return normalize_candidates(raw, path.filename().string());
}

void AmbiguityBand::validate() const {
  if (!(lower < upper))
    throw ConfigError("ambiguity band needs lower < upper, got [" + text::format_double(lower) +
                      ", " + text::format_double(upper) + "]");
}

std::string fill_seed_template(const std::string& word, const IdentityProfile& profile) {
  const auto w = text::trim(word);
  if (w.empty()) throw InputError("seed template needs a nonempty word");
  const std::string copula = profile.agreement == Agreement::plural ? "are" : "is";
  const char first = static_cast<char>(std::tolower(static_cast<unsigned char>(w.front())));
  const std::string article = std::string_view("aeiou").find(first) != std::string_view::npos
                                  ? "an"
                                  : "a";
  return text::capitalize_first(profile.pronoun("en", PronounRole::subject)) + " " + copula + " " +
         article + " " + std::string(w) + " " + profile.noun_for_seed() + ".";
}

std::string_view to_string(ContextStatus status) {
  switch (status) {
    case ContextStatus::ok: return "ok";
    case ContextStatus::copy_failure: return "copy_failure";
    case ContextStatus::no_alignment: return "no_alignment";
    case ContextStatus::translation_failed: return "translation_failed";
    case ContextStatus::scoring_failed: return "scoring_failed";
  }
  return "ok";
}

ScanResult pre_post_scan(const std::vector<CandidateWord>& words,
                         const std::vector<IdentityProfile>& profiles,
                         const ScanBackends& b) {
  if (!b.translator || !b.scorer) throw ConfigError("seed scan needs a translator and a scorer");
  if (!b.lexicon && !b.model) throw ConfigError("seed scan needs an aligner lexicon or model");
  ScanResult res;

  std::vector<std::string> surfaces;
  for (const auto& w : words) surfaces.push_back(w.surface);
  const auto source_scores = b.scorer->eas_many(b.languages.source, surfaces);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (source_scores[i].value) {
      res.pairs.push_back({words[i], *source_scores[i].value, {}});
    } else {
      res.failures.push_back({words[i].surface, "", "source score: " + source_scores[i].error});
    }
  }

  std::vector<std::string> sentences;
  for (auto& pair : res.pairs) {
    for (const auto& profile : profiles) {
      ContextScore c;
      c.identity = profile.key;
      c.sentence = fill_seed_template(pair.word.surface, profile);
      sentences.push_back(c.sentence);
      pair.contexts.push_back(std::move(c));
    }
  }
  const auto translations =
      mt::translate_batch(*b.translator, b.prompt, b.languages, sentences, b.batch);

  const align::WhitespaceSegmenter src_seg;
  const auto tgt_seg = align::make_segmenter(
      b.languages.target, b.lexicon ? b.lexicon->all_targets() : std::set<std::string>{});
  const align::ExtractionSources sources{b.lexicon, b.model, nullptr, b.alignment_floor};

  std::size_t k = 0;
  std::vector<std::string> targets;
  for (auto& pair : res.pairs) {
    for (auto& c : pair.contexts) {
      const auto& t = translations[k++];
      if (!t.hypothesis) {
        c.status = ContextStatus::translation_failed;
        res.failures.push_back({pair.word.surface, c.identity, "translation: " + t.error});
        continue;
      }
      c.hypothesis = t.hypothesis;
      const auto src_tokens = align::token_texts(src_seg.segment(c.sentence));
      std::size_t tracked = 0;
      while (tracked < src_tokens.size() &&
             !text::equals_ignore_case(src_tokens[tracked],
                                       text::split_whitespace(pair.word.surface).front()))
        ++tracked;
      const auto hyp_tokens = align::token_texts(tgt_seg->segment(*t.hypothesis));
      const auto ext = tracked < src_tokens.size()
                           ? align::extract_target_word(sources, src_tokens, tracked, hyp_tokens)
                           : align::ExtractionResult{};
      if (ext.status == align::ExtractionStatus::copy_failure) {
        c.status = ContextStatus::copy_failure;
        res.failures.push_back({pair.word.surface, c.identity, "source word copied verbatim"});
      } else if (ext.status == align::ExtractionStatus::no_alignment) {
        c.status = ContextStatus::no_alignment;
        res.failures.push_back({pair.word.surface, c.identity, "no alignment for the word"});
      } else {
        c.target_word = ext.target_word;
        targets.push_back(*ext.target_word);
      }
    }
  }

  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  const auto target_scores = b.scorer->eas_many(b.languages.target, targets);
  std::unordered_map<std::string, const scoring::Scorer::Outcome*> by_word;
  for (std::size_t i = 0; i < targets.size(); ++i) by_word[targets[i]] = &target_scores[i];
  for (auto& pair : res.pairs) {
    for (auto& c : pair.contexts) {
      if (!c.target_word) continue;
      const auto* o = by_word.at(*c.target_word);
      if (o->value) {
        c.e_translation = *o->value;
      } else {
        c.status = ContextStatus::scoring_failed;
        res.failures.push_back({pair.word.surface, c.identity, "target score: " + o->error});
      }
    }
  }
  return res;
}

std::vector<CandidateWord> ambiguity_filter(const std::vector<ScoredWordPair>& pairs,
                                            const AmbiguityBand& band) {
  band.validate();
  std::vector<CandidateWord> out;
  for (const auto& p : pairs)
    if (band.contains(p.e_source)) out.push_back(p.word);
  return out;
}

void write_scan_csv(std::ostream& out, const std::vector<ScoredWordPair>& pairs) {
  out << "word,e_source,context,e_translation,status\n";
  for (const auto& p : pairs) {
    for (const auto& c : p.contexts) {
      out << csv::quote(p.word.surface) << ',' << text::format_double(p.e_source) << ','
          << csv::quote(c.identity) << ','
          << (c.e_translation ? text::format_double(*c.e_translation) : std::string()) << ','
          << to_string(c.status) << '\n';
    }
  }
}

}  // namespace attishift::seedselect
