#include "attishift/corpusgen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_set>

#include "attishift/parallel.hpp"
#include "attishift/text.hpp"

namespace attishift::corpusgen {

std::string_view to_string(Origin origin) {
  return origin == Origin::authentic ? "authentic" : "synthesized";
}

Origin parse_origin(std::string_view s) {
  if (s == "authentic") return Origin::authentic;
  if (s == "synthesized") return Origin::synthesized;
  throw InputError("unknown origin '" + std::string(s) + "'");
}

namespace {

struct SlotRef {
  std::size_t offset = 0;  // bytes
  std::size_t length = 0;
  bool identity = false;
  PronounRole role = PronounRole::subject;
};

// Markers are "[" + uppercase name + optional ":role" + "]". Other bracketed
// text is left alone.
std::vector<SlotRef> scan_slots(std::string_view s) {
  std::vector<SlotRef> out;
  for (std::size_t at = s.find('['); at != std::string_view::npos; at = s.find('[', at + 1)) {
    std::size_t p = at + 1;
    while (p < s.size() && std::isupper(static_cast<unsigned char>(s[p]))) ++p;
    if (p == at + 1) continue;
    const std::string_view name = s.substr(at + 1, p - at - 1);
    std::string_view arg;
    if (p < s.size() && s[p] == ':') {
      const std::size_t arg_start = ++p;
      while (p < s.size() && s[p] != ']' && s[p] != '[') ++p;
      arg = s.substr(arg_start, p - arg_start);
    }
    if (p >= s.size() || s[p] != ']') continue;
    SlotRef ref;
    ref.offset = at;
    ref.length = p + 1 - at;
    if (name == "IDENTITY" && arg.empty()) {
      ref.identity = true;
    } else if (name == "PRON") {
      ref.role = parse_pronoun_role(arg);
    } else {
      throw InputError("unknown slot marker '" + std::string(s.substr(at, ref.length)) + "'");
    }
    out.push_back(ref);
  }
  return out;
}

std::size_t identity_slot_count(const std::vector<SlotRef>& slots) {
  return static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(), [](const SlotRef& r) { return r.identity; }));
}

bool is_cased_language(std::string_view lang) {
  return !(lang == "zh" || lang == "ja" || lang == "ko" || lang == "th");
}

// True when the next text appended to `out` starts a sentence.
bool at_sentence_start(const std::string& out) {
  std::size_t i = out.size();
  while (i > 0) {
    const char c = out[i - 1];
    if (c == ' ' || c == '\t' || c == '"' || c == '\'' || c == '(') {
      --i;
      continue;
    }
    break;
  }
  if (i == 0) return true;
  const char c = out[i - 1];
  return c == '.' || c == '!' || c == '?';
}

struct SideResult {
  std::string text;
  std::size_t protect_begin = std::string::npos;  // bytes, tracked word
  std::size_t protect_end = std::string::npos;
};

SideResult fill_slots(std::string_view slotted, const IdentityProfile& profile,
                      std::string_view lang, std::size_t protect_begin = std::string::npos,
                      std::size_t protect_end = std::string::npos) {
  const auto slots = scan_slots(slotted);
  const bool cased = is_cased_language(lang);
  SideResult res;
  std::size_t cursor = 0;
  auto copy_literal = [&](std::size_t upto) {
    if (protect_begin != std::string::npos && protect_begin >= cursor && protect_begin < upto) {
      res.protect_begin = res.text.size() + (protect_begin - cursor);
      res.protect_end = res.protect_begin + (protect_end - protect_begin);
    }
    res.text.append(slotted.substr(cursor, upto - cursor));
  };
  for (const auto& slot : slots) {
    copy_literal(slot.offset);
    std::string form =
        slot.identity ? profile.surface_for(lang) : profile.pronoun(lang, slot.role);
    if (cased && at_sentence_start(res.text)) form = text::capitalize_first(form);
    res.text += form;
    cursor = slot.offset + slot.length;
  }
  copy_literal(slotted.size());
  return res;
}

// --- rule-based agreement repair -------------------------------------------

struct WordToken {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string lower;
  bool has_upper = false;
};

std::vector<WordToken> word_tokens(std::string_view s) {
  std::vector<WordToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (!std::isalpha(c)) {
      ++i;
      continue;
    }
    WordToken t;
    t.begin = i;
    while (i < s.size() && (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '\'')) ++i;
    while (i > t.begin + 1 && s[i - 1] == '\'') --i;
    t.end = i;
    for (std::size_t k = t.begin; k < t.end; ++k) {
      const auto ch = static_cast<unsigned char>(s[k]);
      if (std::isupper(ch)) t.has_upper = true;
      t.lower.push_back(static_cast<char>(std::tolower(ch)));
    }
    out.push_back(std::move(t));
  }
  return out;
}

bool only_spaces(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

bool sentence_break(std::string_view s) {
  return s.find_first_of(".!?;") != std::string_view::npos;
}

const std::set<std::string, std::less<>>& adverbs() {
  static const std::set<std::string, std::less<>> kAdverbs{
      "never",   "always",  "often",   "usually", "sometimes", "also",   "still",
      "just",    "rarely",  "seldom",  "only",    "even",      "ever",   "already",
      "truly",   "simply",  "really",  "actually", "hardly",   "barely", "nearly",
      "almost",  "clearly", "not"};
  return kAdverbs;
}

const std::set<std::string, std::less<>>& ly_verbs() {
  static const std::set<std::string, std::less<>> kVerbs{
      "apply", "reply", "rely", "supply", "imply", "multiply", "comply", "ally", "bully", "rally"};
  return kVerbs;
}

bool is_adverb(const std::string& w) {
  if (adverbs().contains(w)) return true;
  return w.size() > 4 && w.ends_with("ly") && !ly_verbs().contains(w);
}

// Words after a subject pronoun that are never inflected.
const std::set<std::string, std::less<>>& frozen_words() {
  static const std::set<std::string, std::less<>> kFrozen{
      // already singular or tense-marked auxiliaries and modals
      "is", "was", "has", "does", "can", "could", "will", "would", "shall", "should", "may",
      "might", "must", "had", "did", "isn't", "wasn't", "hasn't", "doesn't", "didn't", "can't",
      "cannot", "won't", "wouldn't", "couldn't", "shouldn't", "mustn't", "hadn't", "used",
      // irregular past forms
      "became", "began", "bought", "brought", "built", "came", "caught", "chose", "dealt",
      "drew", "drove", "fell", "felt", "fought", "found", "gave", "got", "grew", "heard", "held",
      "kept", "knew", "led", "left", "lost", "made", "meant", "met", "paid", "ran", "rose", "said",
      "sat", "saw", "sent", "set", "sought", "spent", "spoke", "stood", "struck", "taught",
      "thought", "threw", "told", "took", "understood", "went", "won", "wore", "wrote", "let",
      "put", "cut", "hit", "hurt", "lay", "broke", "forgot", "forgave", "overcame", "withdrew",
      // function words and pronouns
      "and", "or", "but", "who", "that", "which", "as", "than", "to", "the", "a", "an", "in",
      "on", "at", "of", "for", "with", "so", "too", "him", "her", "his", "himself", "herself",
      "they", "them", "their", "it", "its", "he", "she", "me", "us", "you", "if", "when",
      "while", "because", "alone", "both", "all", "here", "there"};
  return kFrozen;
}

std::string third_person(const std::string& verb) {
  static const std::map<std::string, std::string, std::less<>> kIrregular{
      {"are", "is"},       {"were", "was"},       {"have", "has"},      {"do", "does"},
      {"go", "goes"},      {"don't", "doesn't"},  {"aren't", "isn't"},  {"weren't", "wasn't"},
      {"haven't", "hasn't"}, {"be", "is"}};
  if (auto it = kIrregular.find(verb); it != kIrregular.end()) return it->second;
  if (frozen_words().contains(verb) || verb.find('\'') != std::string::npos) return verb;
  if (verb.ends_with("ed")) return verb;
  if (verb.ends_with("ss") || verb.ends_with("sh") || verb.ends_with("ch") ||
      verb.ends_with("x") || verb.ends_with("z") || verb.ends_with("o"))
    return verb + "es";
  if (verb.ends_with("s")) return verb;
  if (verb.size() > 1 && verb.back() == 'y' &&
      std::string_view("aeiou").find(verb[verb.size() - 2]) == std::string_view::npos)
    return verb.substr(0, verb.size() - 1) + "ies";
  return verb + "s";
}

std::vector<TextEdit> rule_edits(std::string_view s, const IdentityProfile& profile) {
  std::vector<TextEdit> edits;
  if (profile.agreement != Agreement::singular) return edits;
  const std::string subj = text::to_lower_ascii(profile.pronoun("en", PronounRole::subject));
  const std::string obj = text::to_lower_ascii(profile.pronoun("en", PronounRole::object));
  const std::string refl = profile.pronoun("en", PronounRole::reflexive);
  const auto toks = word_tokens(s);
  auto sep = [&](std::size_t a, std::size_t b) {
    return s.substr(toks[a].end, toks[b].begin - toks[a].end);
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.lower == subj + "'re" || t.lower == subj + "'ve") {
      edits.push_back({t.begin + subj.size(), 3, "'s"});
      continue;
    }
    if (t.lower == "themselves" || t.lower == "themself") {
      // Only when this clause's nearest personal pronoun is the profile's.
      for (std::size_t k = i; k-- > 0;) {
        if (sentence_break(sep(k, k + 1))) break;
        const auto& w = toks[k].lower;
        if (w == "he" || w == "she" || w == "they" || w == "him" || w == "her" || w == "them") {
          if (w == subj || w == obj) {
            std::string form = refl;
            if (t.has_upper) form = text::capitalize_first(form);
            edits.push_back({t.begin, t.end - t.begin, form});
          }
          break;
        }
      }
      continue;
    }
    if (t.lower != subj) continue;
    std::size_t j = i + 1;
    while (j < toks.size() && only_spaces(sep(j - 1, j)) && is_adverb(toks[j].lower)) ++j;
    if (j >= toks.size() || !only_spaces(sep(j - 1, j)) || toks[j].has_upper) continue;
    const std::string fixed = third_person(toks[j].lower);
    if (fixed != toks[j].lower)
      edits.push_back({toks[j].begin, toks[j].end - toks[j].begin, fixed});
  }
  return edits;
}

// Applies non-overlapping edits; edits touching [protect_begin, protect_end)
// are dropped and the protected range is shifted to its new position.
std::string apply_edits(std::string_view s, std::vector<TextEdit> edits,
                        std::size_t* protect_begin = nullptr, std::size_t* protect_end = nullptr) {
  std::sort(edits.begin(), edits.end(),
            [](const TextEdit& a, const TextEdit& b) { return a.offset < b.offset; });
  std::string out;
  std::size_t cursor = 0;
  std::ptrdiff_t shift = 0;
  const bool protecting = protect_begin && *protect_begin != std::string::npos;
  const std::size_t pb = protecting ? *protect_begin : 0;
  const std::size_t pe = protecting ? *protect_end : 0;
  std::ptrdiff_t shift_before_protect = 0;
  for (const auto& e : edits) {
    if (e.offset < cursor || e.offset + e.length > s.size()) continue;
    if (protecting && e.offset < pe && e.offset + e.length > pb) continue;
    if (protecting && e.offset == pb && e.length == 0) continue;
    out.append(s.substr(cursor, e.offset - cursor));
    out.append(e.replacement);
    cursor = e.offset + e.length;
    const auto delta = static_cast<std::ptrdiff_t>(e.replacement.size()) -
                       static_cast<std::ptrdiff_t>(e.length);
    shift += delta;
    if (protecting && e.offset + e.length <= pb) shift_before_protect += delta;
  }
  out.append(s.substr(cursor));
  if (protecting) {
    *protect_begin = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(pb) + shift_before_protect);
    *protect_end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(pe) + shift_before_protect);
  }
  return out;
}

std::string fix_grammar(std::string_view text, const IdentityProfile& profile, std::string_view lang,
                        const GrammarOptions& options, std::size_t* protect_begin,
                        std::size_t* protect_end) {
  std::string out(text);
  if (lang == "en" && profile.pronouns.contains("en"))
    out = apply_edits(out, rule_edits(out, profile), protect_begin, protect_end);
  if (options.service) {
    try {
      auto edits = options.service->check(out, lang);
      out = apply_edits(out, std::move(edits), protect_begin, protect_end);
    } catch (const std::exception& e) {
      if (options.warn) options.warn(std::string("grammar service failed, rule output kept: ") + e.what());
    }
  }
  return out;
}

}  // namespace

void SlottedSentencePair::validate() const {
  if (id.empty()) throw InputError("pair without an id");
  const auto src_slots = scan_slots(source_text);
  const auto tgt_slots = scan_slots(target_text);
  if (identity_slot_count(src_slots) != 1)
    throw InputError("source must contain exactly one [IDENTITY] slot, found " +
                     std::to_string(identity_slot_count(src_slots)));
  if (identity_slot_count(tgt_slots) != 1)
    throw InputError("target must contain exactly one [IDENTITY] slot, found " +
                     std::to_string(identity_slot_count(tgt_slots)));
  if (tracked_word.empty()) throw InputError("empty tracked word");
  const std::size_t len = text::utf8_length(source_text);
  if (word_span.end <= word_span.start || word_span.end > len)
    throw InputError("tracked word span [" + std::to_string(word_span.start) + "," +
                     std::to_string(word_span.end) + "] lies outside the source text");
  const std::size_t b = text::byte_offset(source_text, word_span.start);
  const std::size_t e = text::byte_offset(source_text, word_span.end);
  const auto surface = std::string_view(source_text).substr(b, e - b);
  if (surface != tracked_word)
    throw InputError("tracked word span covers '" + std::string(surface) + "', expected '" +
                     tracked_word + "'");
  for (const auto& slot : src_slots)
    if (b < slot.offset + slot.length && e > slot.offset)
      throw InputError("tracked word span overlaps a slot marker");
}

SlottedSentencePair parse_slotted(std::string_view line, std::size_t line_no) {
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(line_no, "not a JSON object");
  SlottedSentencePair p;
  try {
    p.id = j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump();
    p.source_text = j.at("src").get<std::string>();
    p.target_text = j.at("tgt").get<std::string>();
    p.tracked_word = j.at("word").get<std::string>();
    const auto& span = j.at("word_span");
    if (!span.is_array() || span.size() != 2)
      throw ParseError(line_no, "word_span must be [start, end]");
    p.word_span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
    p.origin = parse_origin(j.at("origin").get<std::string>());
    p.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_no, std::string("schema violation: ") + e.what());
  } catch (const InputError& e) {
    throw ParseError(line_no, e.what());
  }
  return p;
}

nlohmann::json to_json(const SlottedSentencePair& p) {
  return {{"id", p.id},
          {"src", p.source_text},
          {"tgt", p.target_text},
          {"word", p.tracked_word},
          {"word_span", {p.word_span.start, p.word_span.end}},
          {"origin", to_string(p.origin)}};
}

LoadResult load_slotted(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus " + path.string());
  LoadResult res;
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      auto pair = parse_slotted(line, line_no);
      if (!ids.insert(pair.id).second)
        throw ParseError(line_no, "duplicate id '" + pair.id + "'");
      res.pairs.push_back(std::move(pair));
    } catch (const ParseError& e) {
      res.errors.push_back(e);
    }
  }
  return res;
}

nlohmann::json to_json(const RealizedPair& p) {
  return {{"id", p.id},
          {"identity", p.identity},
          {"src", p.source},
          {"tgt", p.target},
          {"word", p.tracked_word},
          {"word_span", {p.word_span.start, p.word_span.end}},
          {"origin", to_string(p.origin)}};
}

RealizedPair realized_from_json(const nlohmann::json& j) {
  RealizedPair p;
  try {
    p.id = j.at("id").get<std::string>();
    p.identity = j.at("identity").get<std::string>();
    p.source = j.at("src").get<std::string>();
    p.target = j.at("tgt").get<std::string>();
    p.tracked_word = j.at("word").get<std::string>();
    p.word_span = {j.at("word_span").at(0).get<std::size_t>(),
                   j.at("word_span").at(1).get<std::size_t>()};
    p.origin = parse_origin(j.at("origin").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed realized pair: ") + e.what());
  }
  return p;
}

LanguageToolService::LanguageToolService(std::string endpoint_url, http::RequestOptions options)
    : endpoint_(http::parse_endpoint(endpoint_url)), options_(options) {}

std::vector<TextEdit> LanguageToolService::edits_from_reply(const nlohmann::json& reply,
                                                            const std::string& text) {
  std::vector<TextEdit> edits;
  if (!reply.contains("matches") || !reply["matches"].is_array()) return edits;
  for (const auto& m : reply["matches"]) {
    if (!m.contains("replacements") || !m["replacements"].is_array() ||
        m["replacements"].empty())
      continue;
    const auto offset = m.at("offset").get<std::size_t>();
    const auto length = m.at("length").get<std::size_t>();
    const std::size_t b = text::byte_offset(text, offset);
    const std::size_t e = text::byte_offset(text, offset + length);
    edits.push_back({b, e - b, m["replacements"][0].at("value").get<std::string>()});
  }
  return edits;
}

std::vector<TextEdit> LanguageToolService::check(const std::string& text,
                                                 std::string_view language) {
  const std::string lang = language == "en" ? "en-US" : std::string(language);
  const std::string body = "text=" + http::url_encode(text) + "&language=" + http::url_encode(lang);
  return edits_from_reply(http::post_form(endpoint_, "/v2/check", body, options_), text);
}

std::string apply_grammar_fixes(std::string_view text, const IdentityProfile& profile,
                                const GrammarOptions& options) {
  return fix_grammar(text, profile, "en", options, nullptr, nullptr);
}

RealizedPair realize_identity(const SlottedSentencePair& pair, const IdentityProfile& profile,
                              const LanguageSides& sides, const GrammarOptions& options) {
  const std::size_t wb = text::byte_offset(pair.source_text, pair.word_span.start);
  const std::size_t we = text::byte_offset(pair.source_text, pair.word_span.end);
  auto src = fill_slots(pair.source_text, profile, sides.source, wb, we);
  auto tgt = fill_slots(pair.target_text, profile, sides.target);

  std::size_t pb = src.protect_begin;
  std::size_t pe = src.protect_end;
  std::string source = fix_grammar(src.text, profile, sides.source, options, &pb, &pe);

  if (pb == std::string::npos || source.compare(pb, pe - pb, pair.tracked_word) != 0)
    throw RealizationError("tracked word '" + pair.tracked_word + "' lost during realization of " +
                           pair.id + " for " + profile.key);
  RealizedPair out;
  out.id = pair.id;
  out.identity = profile.key;
  out.source = std::move(source);
  out.target = std::move(tgt.text);
  out.tracked_word = pair.tracked_word;
  out.word_span = {text::char_offset(out.source, pb), text::char_offset(out.source, pe)};
  out.origin = pair.origin;
  if (!scan_slots(out.source).empty() || !scan_slots(out.target).empty())
    throw RealizationError("residual slot marker after realizing " + pair.id);
  return out;
}

std::string reslot_source(std::string_view realized, const IdentityProfile& profile,
                          std::string_view language) {
  std::vector<std::pair<std::string, std::string>> forms;  // surface form -> marker
  const auto& surface = profile.surface_for(language);
  forms.emplace_back(surface, std::string(kIdentitySlot));
  forms.emplace_back(text::capitalize_first(surface), std::string(kIdentitySlot));
  std::set<std::string> seen;
  for (auto role : kPronounRoles) {
    const auto& form = profile.pronoun(language, role);
    if (!seen.insert(form).second)
      throw InputError("identity '" + profile.key +
                       "' reuses a pronoun form across roles; re-slotting is ambiguous");
    const std::string marker = "[PRON:" + std::string(to_string(role)) + "]";
    forms.emplace_back(form, marker);
    forms.emplace_back(text::capitalize_first(form), marker);
  }
  std::stable_sort(forms.begin(), forms.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  // Replace right-to-left over a protection mask so markers are never rematched.
  std::string out(realized);
  std::vector<bool> taken(out.size(), false);
  std::vector<TextEdit> edits;
  for (const auto& [form, marker] : forms) {
    for (auto at : text::find_whole_word(out, form)) {
      bool free = true;
      for (std::size_t k = at; k < at + form.size(); ++k) free = free && !taken[k];
      if (!free) continue;
      for (std::size_t k = at; k < at + form.size(); ++k) taken[k] = true;
      edits.push_back({at, form.size(), marker});
    }
  }
  return apply_edits(out, std::move(edits));
}

std::size_t ExpansionResult::total_pairs() const {
  std::size_t n = 0;
  for (const auto& [_, v] : settings) n += v.size();
  return n;
}

ExpansionResult expand_corpus(const std::vector<SlottedSentencePair>& corpus,
                              const std::vector<IdentityProfile>& profiles,
                              const ExpansionOptions& options) {
  if (profiles.empty()) throw InputError("expansion needs at least one identity profile");
  struct Row {
    std::vector<RealizedPair> realized;
    std::vector<ManifestEntry> failures;
  };
  std::vector<Row> rows(corpus.size());
  parallel_for(corpus.size(), options.max_parallel, [&](std::size_t i) {
    auto& row = rows[i];
    row.realized.reserve(profiles.size());
    for (const auto& profile : profiles) {
      try {
        row.realized.push_back(realize_identity(corpus[i], profile, options.sides, options.grammar));
      } catch (const std::exception& e) {
        row.failures.push_back({corpus[i].id, profile.key, e.what()});
      }
    }
  });

  ExpansionResult res;
  for (const auto& p : profiles) {
    res.identities.push_back(p.key);
    res.settings[p.key].reserve(corpus.size());
  }
  for (auto& row : rows) {
    if (!row.failures.empty()) {
      for (auto& f : row.failures) res.manifest.push_back(std::move(f));
      continue;
    }
    for (auto& r : row.realized) res.settings[r.identity].push_back(std::move(r));
  }
  return res;
}

double distinct_n(const std::vector<std::string>& corpus, std::size_t n) {
  if (n == 0) throw InputError("distinct-n needs n >= 1");
  if (corpus.empty()) throw InputError("distinct-n of an empty corpus is undefined");
  std::unordered_set<std::string> unique;
  std::size_t total = 0;
  for (const auto& sentence : corpus) {
    const auto toks = text::split_whitespace(sentence);
    if (toks.size() < n) continue;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      std::string gram = toks[i];
      for (std::size_t k = 1; k < n; ++k) {
        gram += '\x1f';
        gram += toks[i + k];
      }
      unique.insert(std::move(gram));
      ++total;
    }
  }
  if (total == 0)
    throw MetricError("distinct-" + std::to_string(n) + " is undefined: corpus has no " +
                      std::to_string(n) + "-grams");
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

std::vector<std::string> synthesis_prompts(std::string_view seed_word) {
  if (seed_word.empty()) throw InputError("synthesis prompts need a seed word");
  std::vector<std::string> out;
  out.reserve(kSynthesisPrefixes.size());
  for (auto prefix : kSynthesisPrefixes) {
    out.push_back("Use " + std::string(seed_word) +
                  " to construct a sentence describing a person with details, beginning with '" +
                  std::string(prefix) + ".'");
  }
  return out;
}

}  // namespace attishift::corpusgen
