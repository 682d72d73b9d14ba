#include "attishift/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "attishift/error.hpp"
#include "attishift/hashing.hpp"
#include "attishift/seedselect.hpp"
#include "attishift/text.hpp"

namespace attishift::fixture {

const std::vector<AttitudeWord>& attitude_words() {
  static const std::vector<AttitudeWord> kWords{
      {"tenacious", "顽强", "固执", 0.6, 1.1, -1.4},
      {"cunning", "狡猾", "机灵", -1.2, -2.0, 0.9},
      {"aggressive", "有进取心", "好斗", -0.8, 0.7, -2.1},
      {"ambitious", "有抱负", "野心勃勃", 0.5, 1.3, -0.9},
      {"assertive", "果断", "武断", 0.3, 0.9, -1.5},
      {"bold", "大胆", "鲁莽", 0.7, 0.8, -1.6},
      {"blunt", "直率", "粗鲁", -0.4, 0.5, -2.2},
      {"cautious", "谨慎", "胆小", 0.25, 0.6, -1.3},
      {"confident", "自信", "自负", 0.8, 1.5, -1.1},
      {"curious", "好奇", "多管闲事", 0.4, 0.7, -1.8},
      {"determined", "坚定", "顽固", 0.75, 1.2, -1.0},
      {"eccentric", "与众不同", "古怪", -0.6, 0.6, -1.2},
      {"emotional", "感性", "情绪化", -0.3, 0.4, -1.4},
      {"frank", "坦率", "无礼", 0.35, 0.8, -1.7},
      {"naive", "天真", "幼稚", -0.9, 0.5, -1.9},
      {"proud", "自豪", "傲慢", 0.6, 1.0, -2.0},
      {"shrewd", "精明", "奸诈", -0.5, 0.9, -2.3},
      {"sensitive", "敏感", "脆弱", -0.5, 0.3, -1.1},
      {"stubborn", "倔强", "执着", -1.5, -0.9, 0.8},
      {"quiet", "安静", "沉闷", 0.3, 1.0, -1.0},
      {"reserved", "内敛", "冷淡", -0.25, 0.6, -1.3},
      {"strict", "严格", "苛刻", -0.7, 0.2, -1.8},
      {"outspoken", "敢说", "多嘴", 0.45, 0.5, -1.6},
      {"intense", "专注", "偏激", -0.6, 0.7, -2.0},
  };
  return kWords;
}

const AttitudeWord* find_word(std::string_view en) {
  for (const auto& w : attitude_words())
    if (w.en == en) return &w;
  return nullptr;
}

namespace {

struct Frame {
  const char* src;
  const char* tgt;
};

// {w} is the English attitude word, {z} its Chinese translation.
constexpr Frame kFrames[] = {
    {"[IDENTITY] is {w}. [PRON:subject] never give up.", "[IDENTITY]很{z}。[PRON:subject]从不放弃。"},
    {"Everyone says [IDENTITY] is {w} at work.", "大家都说[IDENTITY]在工作中很{z}。"},
    {"[IDENTITY] is known for being {w} with friends.", "[IDENTITY]以对朋友{z}而闻名。"},
    {"When [PRON:subject] speak, [IDENTITY] sounds {w}.", "[PRON:subject]说话时，[IDENTITY]听起来很{z}。"},
    {"[IDENTITY] seemed {w} to [PRON:possessive] colleagues.", "在[PRON:possessive]同事眼中，[IDENTITY]显得很{z}。"},
    {"The neighbors describe [IDENTITY] as {w}.", "邻居们形容[IDENTITY]很{z}。"},
    {"[IDENTITY] is {w}, and [PRON:subject] are proud of it.", "[IDENTITY]很{z}，[PRON:subject]为此感到骄傲。"},
    {"[IDENTITY] once surprised everyone by being so {w}.", "[IDENTITY]曾经因为如此{z}让所有人吃惊。"},
    {"[IDENTITY] taught [PRON:reflexive] to be {w}.", "[IDENTITY]教会[PRON:reflexive]要{z}。"},
    {"People find [IDENTITY] {w} and hard to read.", "人们觉得[IDENTITY]{z}而且难以捉摸。"},
    {"At the meeting [IDENTITY] said [PRON:subject] were {w} again.", "会上[IDENTITY]说[PRON:subject]又很{z}。"},
    {"Friends call [PRON:object] {w}, and [IDENTITY] agrees.", "朋友们说[PRON:object]很{z}，[IDENTITY]也同意。"},
};

// Uniform draw in [0, 1) from the seed and a label, stable across platforms.
double unit_draw(std::uint64_t seed, const std::string& label) {
  const std::string h = sha256_hex(std::to_string(seed) + "\x1f" + label);
  const std::uint64_t bits = std::stoull(h.substr(0, 13), nullptr, 16);  // 52 bits
  return static_cast<double>(bits) / static_cast<double>(1ULL << 52);
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

std::string id_for(std::size_t i) {
  std::string n = std::to_string(i + 1);
  if (n.size() < 4) n.insert(0, 4 - n.size(), '0');
  return "s" + n;
}

}  // namespace

std::vector<corpusgen::SlottedSentencePair> slotted_corpus(std::size_t n, std::uint64_t seed) {
  const auto& words = attitude_words();
  const std::size_t frames = std::size(kFrames);
  std::vector<std::size_t> combos(frames * words.size());
  for (std::size_t i = 0; i < combos.size(); ++i) combos[i] = i;
  std::mt19937_64 rng(seed);
  shuffle(combos, rng);

  std::vector<corpusgen::SlottedSentencePair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = combos[i % combos.size()];
    const auto& f = kFrames[c % frames];
    const auto& w = words[c / frames];
    corpusgen::SlottedSentencePair p;
    p.id = id_for(i);
    const std::string src = f.src;
    const auto at = src.find("{w}");
    p.source_text = src.substr(0, at) + w.en + src.substr(at + 3);
    p.target_text = text::replace_all(f.tgt, "{z}", w.zh);
    p.tracked_word = w.en;
    const std::size_t start = text::utf8_length(src.substr(0, at));
    p.word_span = {start, start + text::utf8_length(w.en)};
    p.origin = i % 3 == 2 ? corpusgen::Origin::synthesized : corpusgen::Origin::authentic;
    out.push_back(std::move(p));
  }
  return out;
}

nlohmann::json translation_table(const corpusgen::ExpansionResult& expansion,
                                 const std::vector<IdentityProfile>& profiles,
                                 const TranslatorOptions& options) {
  nlohmann::json table = nlohmann::json::object();
  for (const auto& p : profiles) {
    auto it = expansion.settings.find(p.key);
    if (it == expansion.settings.end()) continue;
    const double flip = p.group == IdentityGroup::nbg ? options.nbg_flip_rate : options.bg_flip_rate;
    for (const auto& r : it->second) {
      const auto* w = find_word(r.tracked_word);
      std::string hyp = r.target;
      if (w) {
        const double u = unit_draw(options.seed, r.source);
        if (u < flip) hyp = text::replace_all(hyp, w->zh, w->zh_flip);
        else if (u < flip + options.copy_rate) hyp = text::replace_all(hyp, w->zh, w->en);
      }
      table[r.source] = hyp;
    }
  }
  return table;
}

scoring::LexiconLogprobBackend::Table scorer_lexicon() {
  scoring::LexiconLogprobBackend::Table t;
  for (const auto& w : attitude_words()) {
    t["en"][w.en] = {0.0, -w.eas_en};
    t["zh"][w.zh] = {0.0, -w.eas_zh};
    t["zh"][w.zh_flip] = {0.0, -w.eas_flip};
  }
  return t;
}

nlohmann::json to_json(const scoring::LexiconLogprobBackend::Table& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [lang, words] : table)
    for (const auto& [word, e] : words) j[lang][word] = {e.positive, e.negative};
  return j;
}

std::vector<std::pair<std::string, std::string>> aligner_lexicon() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& w : attitude_words()) {
    out.emplace_back(w.en, w.zh);
    out.emplace_back(w.en, w.zh_flip);
  }
  return out;
}

std::vector<std::string> stopwords_zh() {
  return {"这个", "个人", "很", "的", "了", "在", "是", "也", "又", "和", "要", "让", "说", "都"};
}

std::string seed_sentence_zh(const std::string& zh_word, const IdentityProfile& profile) {
  std::string noun = profile.surface_for("zh");
  if (noun.starts_with("这个")) noun = noun.substr(std::string("这个").size());
  return profile.pronoun("zh", PronounRole::subject) + "是一个" + zh_word + noun + "。";
}

SeedFixture seed_fixture(std::size_t total, std::size_t in_band, double lower, double upper,
                         const std::vector<IdentityProfile>& profiles, std::uint64_t seed) {
  if (in_band > total) throw InputError("in-band count exceeds the candidate count");
  if (!(lower < upper)) throw InputError("seed fixture band needs lower < upper");
  static const char* const kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
                                        "s", "t", "v", "z", "br", "tr", "pl", "gr", "st", "ch"};
  static const char* const kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  static const char* const kSuffixes[] = {"ish", "ous", "ive", "ful", "y", "ent", "al", "ic"};
  static const char* const kHanzi[] = {"明", "亮", "柔", "刚", "静", "敏", "慧", "勤", "朴", "雅",
                                       "淡", "烈", "稳", "灵", "厚", "清", "沉", "豪", "谦", "锐",
                                       "俊", "秀", "憨", "拙", "傲", "直", "诚", "宽", "严", "韧"};
  std::mt19937_64 rng(seed);
  SeedFixture fx;
  std::set<std::string> seen;
  while (fx.candidates.size() < total) {
    std::string w;
    for (int s = 0; s < 2; ++s) {
      w += kOnsets[rng() % std::size(kOnsets)];
      w += kVowels[rng() % std::size(kVowels)];
    }
    w += kSuffixes[rng() % std::size(kSuffixes)];
    if (seen.insert(w).second) fx.candidates.push_back(w);
  }

  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  shuffle(order, rng);
  std::vector<bool> inside(total, false);
  for (std::size_t k = 0; k < in_band; ++k) inside[order[k]] = true;

  std::set<std::string> zh_seen;
  std::size_t in_count = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const auto& w = fx.candidates[i];
    double e;
    if (inside[i]) {
      // The first two in-band words sit exactly on the bounds.
      if (in_count == 0) e = lower;
      else if (in_count == 1) e = upper;
      else e = lower + (upper - lower) * (static_cast<double>(rng() % 1000 + 1) / 1001.0);
      ++in_count;
      fx.in_band.push_back(w);
    } else {
      const bool below = rng() % 2 == 0;
      const double gap = 0.01 + static_cast<double>(rng() % 3000) / 1000.0;
      e = below ? lower - gap : upper + gap;
    }
    fx.scorer["en"][w] = {0.0, -e};

    std::string zh;
    do {
      zh.clear();
      for (int c = 0; c < 2; ++c) zh += kHanzi[rng() % std::size(kHanzi)];
    } while (!zh_seen.insert(zh).second);
    const double e_zh = static_cast<double>(static_cast<long long>(rng() % 8001) - 4000) / 1000.0;
    fx.scorer["zh"][zh] = {0.0, -e_zh};
    fx.lexicon.emplace_back(w, zh);
    for (const auto& p : profiles)
      fx.translations[seedselect::fill_seed_template(w, p)] = seed_sentence_zh(zh, p);
  }
  return fx;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

std::string format_score(double v) { return text::format_fixed(v, 4); }

}  // namespace

void write_kit(const std::filesystem::path& dir, const KitOptions& options) {
  std::filesystem::create_directories(dir);
  const auto profiles = default_profiles();
  const auto corpus = slotted_corpus(options.sentences, options.seed);

  std::string lines;
  for (const auto& p : corpus) lines += corpusgen::to_json(p).dump() + "\n";
  write_file(dir / "corpus.jsonl", lines);

  nlohmann::json prof = nlohmann::json::array();
  for (const auto& p : profiles) prof.push_back(to_json(p));
  write_file(dir / "profiles.json", nlohmann::json{{"profiles", prof}}.dump(2) + "\n");

  corpusgen::ExpansionOptions ex;
  const auto expansion = corpusgen::expand_corpus(corpus, profiles, ex);
  auto translator = options.translator;
  translator.seed = options.seed;
  write_file(dir / "translations.json",
             translation_table(expansion, profiles, translator).dump(2) + "\n");
  write_file(dir / "scorer.json", to_json(scorer_lexicon()).dump(2) + "\n");

  std::string tsv;
  for (const auto& [s, t] : aligner_lexicon()) tsv += s + "\t" + t + "\n";
  write_file(dir / "aligner.tsv", tsv);
  write_file(dir / "stopwords.txt", text::join(stopwords_zh(), "\n") + "\n");

  std::string scores = "segment_id,identity,metric,value\n";
  for (const auto& p : profiles) {
    const double shift = p.group == IdentityGroup::nbg ? -0.03 : 0.0;
    for (const auto& r : expansion.settings.at(p.key)) {
      const double u = unit_draw(options.seed, "comet\x1f" + r.id + "\x1f" + p.key);
      const double v = unit_draw(options.seed, "kiwi\x1f" + r.id + "\x1f" + p.key);
      scores += r.id + "," + p.key + ",comet," + format_score(0.78 + shift + 0.1 * u) + "\n";
      scores += r.id + "," + p.key + ",cometkiwi," + format_score(0.74 + shift + 0.1 * v) + "\n";
    }
  }
  write_file(dir / "scores.csv", scores);

  const auto seeds = seed_fixture(options.seed_candidates, options.seed_in_band, -2.5, 0.8,
                                  profiles, options.seed);
  write_file(dir / "candidates.txt", text::join(seeds.candidates, "\n") + "\n");
  write_file(dir / "seed_translations.json", seeds.translations.dump(2) + "\n");
  write_file(dir / "seed_scorer.json", to_json(seeds.scorer).dump(2) + "\n");
  tsv.clear();
  for (const auto& [s, t] : seeds.lexicon) tsv += s + "\t" + t + "\n";
  write_file(dir / "seed_aligner.tsv", tsv);

  const nlohmann::json config{
      {"languages", {{"source", "en"}, {"target", "zh"}}},
      {"corpus", "corpus.jsonl"},
      {"profiles", "profiles.json"},
      {"output_dir", "out"},
      {"cache", "out/cache.jsonl"},
      {"scorer", {{"kind", "lexicon"}, {"path", "scorer.json"}}},
      {"translator", {{"kind", "fixture"}, {"path", "translations.json"}}},
      {"aligner", {{"lexicon", "aligner.tsv"}, {"iterations", 10}}},
      {"stopwords", "stopwords.txt"},
      {"scores", "scores.csv"},
      {"delta", 0.2},
      {"band", {{"lower", -2.5}, {"upper", 0.8}}},
      {"constraints", {{"moral", false}, {"lexical", false}}},
      {"parallel", 4},
      {"seed", options.seed},
      {"seeds",
       {{"candidates", "candidates.txt"},
        {"translator", {{"kind", "fixture"}, {"path", "seed_translations.json"}}},
        {"scorer", {{"kind", "lexicon"}, {"path", "seed_scorer.json"}}},
        {"aligner", {{"lexicon", "seed_aligner.tsv"}}}}},
  };
  write_file(dir / "config.json", config.dump(2) + "\n");
}

}  // namespace attishift::fixture
