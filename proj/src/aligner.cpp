#include "attishift/aligner.hpp"

#include <cmath>
#include <fstream>
#include <unordered_map>

#include "attishift/process.hpp"
#include "attishift/text.hpp"

namespace attishift::align {

std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

namespace {

struct CodePoint {
  char32_t cp;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> code_points(std::string_view s) {
  std::vector<CodePoint> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t begin = pos;
    const char32_t cp = text::decode_utf8(s, pos);
    out.push_back({cp, begin, pos});
  }
  return out;
}

}  // namespace

std::vector<Token> WhitespaceSegmenter::segment(std::string_view s) const {
  std::vector<Token> out;
  const auto cps = code_points(s);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (text::is_space(cps[i].cp)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !text::is_space(cps[j].cp)) ++j;
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && text::is_punct(cps[b].cp)) ++b;
    while (e > b && text::is_punct(cps[e - 1].cp)) --e;
    if (b < e) {
      const std::size_t bb = cps[b].begin;
      const std::size_t be = cps[e - 1].end;
      out.push_back({std::string(s.substr(bb, be - bb)), bb, be});
    }
    i = j;
  }
  return out;
}

DictionarySegmenter::DictionarySegmenter(std::set<std::string> words) : words_(std::move(words)) {
  for (const auto& w : words_) max_chars_ = std::max(max_chars_, text::utf8_length(w));
}

std::vector<Token> DictionarySegmenter::segment(std::string_view s) const {
  std::vector<Token> out;
  const auto cps = code_points(s);
  auto slice = [&](std::size_t a, std::size_t b) {
    const std::size_t bb = cps[a].begin;
    const std::size_t be = cps[b - 1].end;
    return Token{std::string(s.substr(bb, be - bb)), bb, be};
  };
  std::vector<std::size_t> uncovered;  // indices of a pending uncovered CJK run
  auto flush = [&] {
    if (uncovered.size() == 1) {
      out.push_back(slice(uncovered[0], uncovered[0] + 1));
    } else {
      for (std::size_t k = 0; k + 1 < uncovered.size(); ++k)
        out.push_back(slice(uncovered[k], uncovered[k] + 2));
    }
    uncovered.clear();
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i].cp;
    if (text::is_space(cp) || text::is_punct(cp)) {
      flush();
      ++i;
      continue;
    }
    if (!text::is_cjk(cp)) {
      flush();
      std::size_t j = i;
      while (j < cps.size() && !text::is_cjk(cps[j].cp) && !text::is_space(cps[j].cp) &&
             !text::is_punct(cps[j].cp))
        ++j;
      out.push_back(slice(i, j));
      i = j;
      continue;
    }
    std::size_t matched = 0;
    for (std::size_t len = std::min(max_chars_, cps.size() - i); len >= 1; --len) {
      const auto tok = slice(i, i + len);
      if (words_.contains(tok.text)) {
        matched = len;
        break;
      }
    }
    if (matched > 0) {
      flush();
      out.push_back(slice(i, i + matched));
      i += matched;
    } else {
      // A bigram fallback run ends at the next non-CJK character.
      uncovered.push_back(i);
      ++i;
    }
  }
  flush();
  return out;
}

bool is_unsegmented_language(std::string_view lang) {
  return lang == "zh" || lang == "ja" || lang == "th";
}

std::unique_ptr<Segmenter> make_segmenter(std::string_view lang,
                                          const std::set<std::string>& dictionary) {
  if (is_unsegmented_language(lang)) return std::make_unique<DictionarySegmenter>(dictionary);
  return std::make_unique<WhitespaceSegmenter>();
}

void Lexicon::add(std::string source, std::string target) {
  auto& list = map_[text::to_lower_ascii(source)];
  if (std::find(list.begin(), list.end(), target) != list.end()) return;
  list.push_back(std::move(target));
  ++entries_;
}

const std::vector<std::string>* Lexicon::targets(std::string_view source) const {
  auto it = map_.find(text::to_lower_ascii(source));
  return it == map_.end() ? nullptr : &it->second;
}

std::set<std::string> Lexicon::all_targets() const {
  std::set<std::string> out;
  for (const auto& [_, list] : map_) out.insert(list.begin(), list.end());
  return out;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon " + path.string());
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(line_no, "lexicon line needs source<TAB>target");
    auto src = std::string(text::trim(std::string_view(line).substr(0, tab)));
    auto tgt = std::string(text::trim(std::string_view(line).substr(tab + 1)));
    if (src.empty() || tgt.empty()) throw ParseError(line_no, "empty lexicon field");
    lex.add(std::move(src), std::move(tgt));
  }
  return lex;
}

double AlignmentModel::probability(const std::string& source, const std::string& target) const {
  auto row = table.find(source);
  if (row == table.end()) return 0.0;
  auto cell = row->second.find(target);
  return cell == row->second.end() ? 0.0 : cell->second;
}

namespace {

// prior[j][i] for a pair with l source and m target tokens.
std::vector<std::vector<double>> diagonal_prior(std::size_t l, std::size_t m, double tension) {
  std::vector<std::vector<double>> prior(m, std::vector<double>(l));
  for (std::size_t j = 0; j < m; ++j) {
    const double tj = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    double z = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      const double si = (static_cast<double>(i) + 0.5) / static_cast<double>(l);
      prior[j][i] = std::exp(-tension * std::abs(si - tj));
      z += prior[j][i];
    }
    for (auto& p : prior[j]) p /= z;
  }
  return prior;
}

struct Encoded {
  std::vector<std::vector<int>> src;
  std::vector<std::vector<int>> tgt;
  std::vector<std::string> src_vocab;
  std::vector<std::string> tgt_vocab;
};

Encoded encode(const std::vector<SentencePair>& pairs) {
  Encoded enc;
  std::unordered_map<std::string, int> s_ids;
  std::unordered_map<std::string, int> t_ids;
  auto id = [](std::unordered_map<std::string, int>& ids, std::vector<std::string>& vocab,
               const std::string& w) {
    auto [it, inserted] = ids.emplace(w, static_cast<int>(vocab.size()));
    if (inserted) vocab.push_back(w);
    return it->second;
  };
  for (const auto& [s, t] : pairs) {
    if (s.empty() || t.empty()) continue;
    auto& es = enc.src.emplace_back();
    auto& et = enc.tgt.emplace_back();
    for (const auto& w : s) es.push_back(id(s_ids, enc.src_vocab, w));
    for (const auto& w : t) et.push_back(id(t_ids, enc.tgt_vocab, w));
  }
  return enc;
}

using SparseTable = std::vector<std::unordered_map<int, double>>;

double log_likelihood(const Encoded& enc, const SparseTable& t,
                      const std::vector<std::vector<std::vector<double>>>& priors) {
  double ll = 0.0;
  for (std::size_t k = 0; k < enc.src.size(); ++k) {
    const auto& s = enc.src[k];
    const auto& f = enc.tgt[k];
    for (std::size_t j = 0; j < f.size(); ++j) {
      double p = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) p += priors[k][j][i] * t[s[i]].at(f[j]);
      ll += std::log(p);
    }
  }
  return ll;
}

}  // namespace

AlignmentModel train_statistical_aligner(const std::vector<SentencePair>& pairs,
                                         std::size_t iterations, const TrainingOptions& options) {
  if (iterations == 0) throw TrainingError("aligner training needs at least one iteration");
  if (options.diagonal_tension < 0.0) throw TrainingError("diagonal tension must be >= 0");
  const Encoded enc = encode(pairs);
  if (enc.src.empty() || enc.src_vocab.empty() || enc.tgt_vocab.empty())
    throw TrainingError("aligner training corpus has an empty vocabulary");

  std::vector<std::vector<std::vector<double>>> priors;
  priors.reserve(enc.src.size());
  for (std::size_t k = 0; k < enc.src.size(); ++k)
    priors.push_back(diagonal_prior(enc.src[k].size(), enc.tgt[k].size(), options.diagonal_tension));

  const double uniform = 1.0 / static_cast<double>(enc.tgt_vocab.size());
  SparseTable t(enc.src_vocab.size());
  for (std::size_t k = 0; k < enc.src.size(); ++k)
    for (int e : enc.src[k])
      for (int f : enc.tgt[k]) t[e].emplace(f, uniform);

  AlignmentModel model;
  model.iterations = iterations;
  model.source_vocabulary = enc.src_vocab.size();
  model.target_vocabulary = enc.tgt_vocab.size();
  model.diagonal_tension = options.diagonal_tension;

  for (std::size_t it = 0; it < iterations; ++it) {
    model.log_likelihood.push_back(log_likelihood(enc, t, priors));
    SparseTable counts(enc.src_vocab.size());
    for (std::size_t k = 0; k < enc.src.size(); ++k) {
      const auto& s = enc.src[k];
      const auto& f = enc.tgt[k];
      std::vector<double> post(s.size());
      for (std::size_t j = 0; j < f.size(); ++j) {
        double z = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
          post[i] = priors[k][j][i] * t[s[i]].at(f[j]);
          z += post[i];
        }
        for (std::size_t i = 0; i < s.size(); ++i) counts[s[i]][f[j]] += post[i] / z;
      }
    }
    for (std::size_t e = 0; e < t.size(); ++e) {
      double total = 0.0;
      for (const auto& [_, c] : counts[e]) total += c;
      for (auto& [f, p] : t[e]) {
        auto c = counts[e].find(f);
        p = c == counts[e].end() ? 0.0 : c->second / total;
      }
    }
  }
  model.log_likelihood.push_back(log_likelihood(enc, t, priors));

  for (std::size_t e = 0; e < t.size(); ++e) {
    auto& row = model.table[enc.src_vocab[e]];
    for (const auto& [f, p] : t[e]) row[enc.tgt_vocab[f]] = p;
  }
  return model;
}

double corpus_log_likelihood(const AlignmentModel& model, const std::vector<SentencePair>& pairs) {
  double ll = 0.0;
  for (const auto& [s, f] : pairs) {
    if (s.empty() || f.empty()) continue;
    const auto prior = diagonal_prior(s.size(), f.size(), model.diagonal_tension);
    for (std::size_t j = 0; j < f.size(); ++j) {
      double p = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) p += prior[j][i] * model.probability(s[i], f[j]);
      ll += std::log(p);
    }
  }
  return ll;
}

std::string_view to_string(ExtractionMethod method) {
  switch (method) {
    case ExtractionMethod::lexicon: return "lexicon";
    case ExtractionMethod::statistical: return "statistical";
    case ExtractionMethod::external: return "external";
    case ExtractionMethod::none: return "none";
  }
  return "none";
}

std::string_view to_string(ExtractionStatus status) {
  switch (status) {
    case ExtractionStatus::ok: return "ok";
    case ExtractionStatus::copy_failure: return "copy_failure";
    case ExtractionStatus::no_alignment: return "no_alignment";
  }
  return "no_alignment";
}

ExtractionResult extract_target_word(const ExtractionSources& sources,
                                     const std::vector<std::string>& source_tokens,
                                     std::size_t tracked_index,
                                     const std::vector<std::string>& hyp) {
  if (tracked_index >= source_tokens.size())
    throw InputError("tracked token index " + std::to_string(tracked_index) + " out of range");
  const std::string& word = source_tokens[tracked_index];
  ExtractionResult res;

  for (const auto& h : hyp) {
    if (text::equals_ignore_case(h, word)) {
      res.status = ExtractionStatus::copy_failure;
      return res;
    }
  }

  if (sources.lexicon) {
    if (const auto* targets = sources.lexicon->targets(word)) {
      for (std::size_t j = 0; j < hyp.size(); ++j) {
        for (const auto& target : *targets) {
          if (hyp[j] == target) {
            res.target_word = target;
            res.target_index = j;
          }
          if (res.target_word) {
            res.method = ExtractionMethod::lexicon;
            res.status = ExtractionStatus::ok;
            return res;
          }
        }
      }
    }
  }

  if (sources.links) {
    std::optional<std::size_t> best;
    for (const auto& [i, j] : *sources.links)
      if (i == tracked_index && j < hyp.size() && (!best || j < *best)) best = j;
    if (best) {
      res.target_word = hyp[*best];
      res.target_index = best;
      res.method = ExtractionMethod::external;
      res.status = ExtractionStatus::ok;
    }
    return res;
  }

  if (sources.model) {
    double best_p = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < hyp.size(); ++j) {
      const double p = sources.model->probability(word, hyp[j]);
      if (p > best_p) {
        best_p = p;
        best_j = j;
      }
    }
    if (!hyp.empty() && best_p >= sources.floor) {
      res.target_word = hyp[best_j];
      res.target_index = best_j;
      res.method = ExtractionMethod::statistical;
      res.status = ExtractionStatus::ok;
    }
  }
  return res;
}

std::optional<std::size_t> token_at(const std::vector<Token>& tokens, std::size_t offset) {
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i].begin <= offset && offset < tokens[i].end) return i;
  return std::nullopt;
}

Links parse_pharaoh(std::string_view line) {
  Links links;
  for (const auto& item : text::split_whitespace(line)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == item.size())
      throw InputError("malformed alignment link '" + item + "'");
    try {
      std::size_t used = 0;
      const auto i = std::stoul(item.substr(0, dash), &used);
      if (used != dash) throw std::invalid_argument(item);
      const auto rest = item.substr(dash + 1);
      const auto j = std::stoul(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(item);
      links.emplace_back(i, j);
    } catch (const std::logic_error&) {
      throw InputError("malformed alignment link '" + item + "'");
    }
  }
  return links;
}

ExternalAligner::ExternalAligner(std::string command) : command_(std::move(command)) {
  if (command_.empty()) throw ConfigError("external aligner needs a command");
}

std::vector<Links> ExternalAligner::align(const std::vector<SentencePair>& pairs) {
  std::lock_guard lock(mutex_);
  std::vector<std::string> lines;
  lines.reserve(pairs.size());
  for (const auto& [s, t] : pairs) lines.push_back(text::join(s, " ") + " ||| " + text::join(t, " "));
  const auto out = run_filter(command_, lines);
  if (out.size() != pairs.size())
    throw Error("external aligner returned " + std::to_string(out.size()) + " lines for " +
                std::to_string(pairs.size()) + " pairs");
  std::vector<Links> links;
  links.reserve(out.size());
  for (const auto& l : out) links.push_back(parse_pharaoh(l));
  return links;
}

}  // namespace attishift::align
