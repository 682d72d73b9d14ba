#include "attishift/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "attishift/csv.hpp"
#include "attishift/text.hpp"

namespace attishift::pipeline {

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  const auto path = text::split(assignment.substr(0, eq), '.');
  const std::string raw = assignment.substr(eq + 1);
  auto value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  nlohmann::json* node = &doc;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (path[i].empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    if (!node->is_object()) *node = nlohmann::json::object();
    node = &(*node)[path[i]];
  }
  if (!node->is_object()) *node = nlohmann::json::object();
  (*node)[path.back()] = std::move(value);
}

namespace {

class Reader {
 public:
  Reader(const nlohmann::json& j, std::string where, const std::filesystem::path& base)
      : j_(j), where_(std::move(where)), base_(base) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  bool has(const char* key) {
    used_.insert(key);
    return j_.contains(key) && !j_[key].is_null();
  }

  template <typename T>
  T get(const char* key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(name(key) + " has the wrong type");
    }
  }

  std::filesystem::path path(const char* key, bool must_exist = true) {
    if (!has(key)) return {};
    const auto s = get<std::string>(key, "");
    if (s.empty()) return {};
    std::filesystem::path p(s);
    if (p.is_relative()) p = base_ / p;
    p = p.lexically_normal();
    if (must_exist && !std::filesystem::exists(p))
      throw ConfigError(name(key) + " refers to a missing file: " + p.string());
    return p;
  }

  Reader child(const char* key) {
    used_.insert(key);
    return Reader(j_.at(key), name(key), base_);
  }

  const nlohmann::json& raw(const char* key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string name(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!used_.contains(k)) throw ConfigError("unknown configuration key " + name(k.c_str()));
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::filesystem::path base_;
  std::set<std::string> used_;
};

http::RequestOptions read_request(Reader& r) {
  http::RequestOptions o;
  o.timeout_s = r.get<double>("timeout_s", o.timeout_s);
  o.retries = r.get<int>("retries", o.retries);
  o.backoff_ms = r.get<int>("backoff_ms", o.backoff_ms);
  return o;
}

scoring::ScorerBackendHandle read_scorer(Reader r, std::size_t parallel) {
  scoring::ScorerBackendHandle h;
  h.kind = r.get<std::string>("kind", "");
  if (h.kind.empty()) throw ConfigError(r.name("kind") + " is required");
  h.path = r.path("path");
  h.endpoint = r.get<std::string>("endpoint", "");
  h.model = r.get<std::string>("model", "");
  h.use_cache = r.get<bool>("cache", true);
  h.max_parallel = parallel;
  h.request = read_request(r);
  r.finish();
  if ((h.kind == "fixture" || h.kind == "lexicon") && h.path.empty())
    throw ConfigError(r.name("path") + " is required for a " + h.kind + " scorer");
  return h;
}

mt::TranslatorConfig read_translator(Reader r) {
  mt::TranslatorConfig t;
  t.kind = r.get<std::string>("kind", "");
  if (t.kind.empty()) throw ConfigError(r.name("kind") + " is required");
  t.path = r.path("path");
  t.endpoint = r.get<std::string>("endpoint", "");
  t.model = r.get<std::string>("model", "");
  t.command = r.get<std::string>("command", "");
  t.decoding.beam_size = r.get<int>("beam_size", t.decoding.beam_size);
  t.decoding.max_new_tokens = r.get<int>("max_new_tokens", t.decoding.max_new_tokens);
  t.decoding.send_beam = r.get<bool>("send_beam", t.decoding.send_beam);
  t.request = read_request(r);
  r.finish();
  if (t.kind == "fixture" && t.path.empty())
    throw ConfigError(r.name("path") + " is required for a fixture translator");
  return t;
}

AlignerConfig read_aligner(Reader r) {
  AlignerConfig a;
  a.lexicon = r.path("lexicon");
  a.statistical = r.get<bool>("statistical", a.statistical);
  a.iterations = r.get<std::size_t>("iterations", a.iterations);
  a.floor = r.get<double>("floor", a.floor);
  a.diagonal_tension = r.get<double>("tension", a.diagonal_tension);
  a.command = r.get<std::string>("command", "");
  r.finish();
  return a;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  c.document = doc;
  Reader r(doc, "", base_dir);
  c.parallel = r.get<std::size_t>("parallel", c.parallel);
  if (c.parallel == 0) throw ConfigError("parallel must be at least 1");
  c.seed = r.get<std::uint64_t>("seed", c.seed);
  if (r.has("languages")) {
    auto l = r.child("languages");
    c.languages.source = l.get<std::string>("source", c.languages.source);
    c.languages.target = l.get<std::string>("target", c.languages.target);
    l.finish();
  }
  c.corpus = r.path("corpus");
  c.profiles = r.path("profiles");
  c.output_dir = r.path("output_dir", false);
  if (c.output_dir.empty()) c.output_dir = (base_dir / "out").lexically_normal();
  c.cache = r.path("cache", false);
  c.stopwords = r.path("stopwords");
  c.scores = r.path("scores");
  if (r.has("scorer")) c.scorer = read_scorer(r.child("scorer"), c.parallel);
  if (r.has("translator")) c.translator = read_translator(r.child("translator"));
  if (r.has("aligner")) c.aligner = read_aligner(r.child("aligner"));
  if (r.has("templates")) {
    for (const auto& [lang, t] : r.raw("templates").items()) {
      Reader tr(t, "templates." + lang, base_dir);
      scoring::AttitudeTemplatePair pair{lang, tr.get<std::string>("positive", ""),
                                         tr.get<std::string>("negative", ""),
                                         tr.get<std::string>("token", "")};
      tr.finish();
      try {
        pair.validate();
      } catch (const TemplateError& e) {
        throw ConfigError("templates." + lang + ": " + e.what());
      }
      c.templates[lang] = pair;
    }
  }
  c.grammar_service = r.get<std::string>("grammar_service", "");
  c.delta = r.get<double>("delta", c.delta);
  if (!(c.delta > 0.0)) throw ConfigError("delta must be > 0");
  if (r.has("band")) {
    auto b = r.child("band");
    c.band.lower = b.get<double>("lower", c.band.lower);
    c.band.upper = b.get<double>("upper", c.band.upper);
    b.finish();
  }
  c.band.validate();
  if (r.has("constraints")) {
    auto k = r.child("constraints");
    c.moral = k.get<bool>("moral", false);
    c.lexical = k.get<bool>("lexical", false);
    if (k.has("terms")) {
      try {
        c.lexical_terms = k.raw("terms").get<std::vector<mt::TermPair>>();
      } catch (const nlohmann::json::exception&) {
        throw ConfigError("constraints.terms must be a list of [source, target] pairs");
      }
    }
    k.finish();
  }
  c.allow_partial = r.get<bool>("allow_partial", false);
  if (r.has("seeds")) {
    auto s = r.child("seeds");
    c.seeds.candidates = s.path("candidates");
    if (s.has("translator")) c.seeds.translator = read_translator(s.child("translator"));
    if (s.has("scorer")) c.seeds.scorer = read_scorer(s.child("scorer"), c.parallel);
    if (s.has("aligner")) c.seeds.aligner = read_aligner(s.child("aligner"));
    s.finish();
  }
  r.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ConfigError(path.string() + " is not a JSON object");
  for (const auto& o : overrides) apply_override(doc, o);
  auto base = std::filesystem::absolute(path).parent_path();
  return config_from_json(doc, base);
}

Context::Context(RunConfig cfg, Logger warn_sink, Logger info_sink)
    : config(std::move(cfg)), warn(std::move(warn_sink)), info(std::move(info_sink)) {
  if (!warn) warn = [](const std::string&) {};
  if (!info) info = [](const std::string&) {};
  profiles = config.profiles.empty() ? default_profiles() : load_profiles(config.profiles);
  if (config.cache.empty()) {
    cache = std::make_shared<ResponseCache>();
  } else {
    std::filesystem::create_directories(config.cache.parent_path());
    cache = std::make_shared<ResponseCache>(config.cache);
    if (cache->skipped_lines() > 0)
      warn("cache " + config.cache.string() + ": skipped " + std::to_string(cache->skipped_lines()) +
           " malformed lines");
  }
}

std::filesystem::path Context::stage_dir(std::string_view stage) const {
  return config.output_dir / std::string(stage);
}

mt::PromptSpec Context::prompt_spec() const {
  return mt::make_prompt_spec(config.moral, config.lexical, config.languages, config.lexical_terms);
}

std::shared_ptr<mt::TranslationBackend> Context::translator() {
  if (!translator_) {
    if (config.translator.kind.empty()) throw ConfigError("no translator configured");
    translator_ = mt::make_translator(config.translator, prompt_spec(), config.languages);
  }
  return translator_;
}

namespace {

std::map<std::string, scoring::AttitudeTemplatePair> templates_for(const RunConfig& c) {
  std::map<std::string, scoring::AttitudeTemplatePair> out;
  for (const auto& lang : {c.languages.source, c.languages.target}) {
    auto it = c.templates.find(lang);
    out[lang] = it != c.templates.end() ? it->second : scoring::builtin_templates(lang);
  }
  return out;
}

std::shared_ptr<scoring::Scorer> make_scorer(const RunConfig& c,
                                             const scoring::ScorerBackendHandle& handle,
                                             std::shared_ptr<ResponseCache> cache) {
  if (handle.kind.empty()) throw ConfigError("no scorer configured");
  auto templates = templates_for(c);
  std::vector<scoring::AttitudeTemplatePair> list;
  for (const auto& [_, t] : templates) list.push_back(t);
  auto backend = scoring::make_logprob_backend(handle, list, std::move(cache));
  return std::make_shared<scoring::Scorer>(backend, templates, c.parallel);
}

}  // namespace

std::shared_ptr<scoring::Scorer> Context::scorer() {
  if (!scorer_) scorer_ = make_scorer(config, config.scorer, cache);
  return scorer_;
}

nlohmann::json to_json(const TranslatedRow& r) {
  nlohmann::json j{{"id", r.id},
                   {"identity", r.identity},
                   {"src", r.source},
                   {"ref", r.reference},
                   {"word", r.word},
                   {"word_span", {r.word_span.start, r.word_span.end}},
                   {"hyp", nullptr}};
  if (r.hypothesis) j["hyp"] = *r.hypothesis;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

TranslatedRow translated_from_json(const nlohmann::json& j) {
  TranslatedRow r;
  try {
    r.id = j.at("id").get<std::string>();
    r.identity = j.at("identity").get<std::string>();
    r.source = j.at("src").get<std::string>();
    r.reference = j.at("ref").get<std::string>();
    r.word = j.at("word").get<std::string>();
    r.word_span = {j.at("word_span").at(0).get<std::size_t>(),
                   j.at("word_span").at(1).get<std::size_t>()};
    if (!j.at("hyp").is_null()) r.hypothesis = j["hyp"].get<std::string>();
    if (j.contains("error")) r.error = j["error"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed translation row: ") + e.what());
  }
  return r;
}

corpusgen::ExpansionResult expand(Context& ctx,
                                  const std::vector<corpusgen::SlottedSentencePair>& corpus) {
  corpusgen::ExpansionOptions opt;
  opt.sides = {ctx.config.languages.source, ctx.config.languages.target};
  opt.max_parallel = ctx.config.parallel;
  if (!ctx.config.grammar_service.empty())
    opt.grammar.service = std::make_shared<corpusgen::LanguageToolService>(ctx.config.grammar_service);
  opt.grammar.warn = ctx.warn;
  return corpusgen::expand_corpus(corpus, ctx.profiles, opt);
}

Translated translate(Context& ctx, const Realized& realized, StageResult& result) {
  auto backend = ctx.translator();
  std::vector<const corpusgen::RealizedPair*> flat;
  std::vector<std::string> sources;
  for (const auto& p : ctx.profiles) {
    auto it = realized.find(p.key);
    if (it == realized.end()) throw InputError("no realized corpus for identity '" + p.key + "'");
    for (const auto& r : it->second) {
      flat.push_back(&r);
      sources.push_back(r.source);
    }
  }
  mt::BatchOptions batch{ctx.config.parallel, ctx.cache};
  const auto outcomes =
      mt::translate_batch(*backend, ctx.prompt_spec(), ctx.config.languages, sources, batch);
  Translated out;
  for (const auto& p : ctx.profiles) out[p.key];
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const auto& r = *flat[i];
    TranslatedRow row{r.id, r.identity, r.source, r.target, r.tracked_word, r.word_span,
                      outcomes[i].hypothesis, outcomes[i].error};
    if (!row.hypothesis) result.problems.push_back({"translate", r.id, r.identity, row.error});
    out[r.identity].push_back(std::move(row));
  }
  return out;
}

namespace {

align::Lexicon maybe_lexicon(const std::filesystem::path& p) {
  return p.empty() ? align::Lexicon{} : align::load_lexicon(p);
}

std::unique_ptr<align::Segmenter> target_segmenter(const Context& ctx, const align::Lexicon& lexicon) {
  const auto& lang = ctx.config.languages.target;
  auto words = lexicon.all_targets();
  for (const auto& p : ctx.profiles) {
    if (auto it = p.surface.find(lang); it != p.surface.end()) words.insert(it->second);
    if (auto it = p.pronouns.find(lang); it != p.pronouns.end())
      for (const auto& [_, form] : it->second) words.insert(form);
  }
  return align::make_segmenter(lang, words);
}

}  // namespace

Records score(Context& ctx, const Translated& translated, StageResult& result) {
  auto scorer = ctx.scorer();
  const auto& cfg = ctx.config;
  const auto lexicon = maybe_lexicon(cfg.aligner.lexicon);
  const align::WhitespaceSegmenter src_seg;
  const auto tgt_seg = target_segmenter(ctx, lexicon);

  struct Work {
    const TranslatedRow* row;
    std::vector<align::Token> src;
    std::vector<std::string> hyp;
    std::optional<std::size_t> tracked;
  };
  std::vector<Work> work;
  for (const auto& p : ctx.profiles) {
    auto it = translated.find(p.key);
    if (it == translated.end()) throw InputError("no translations for identity '" + p.key + "'");
    for (const auto& row : it->second) {
      if (!row.hypothesis) {
        result.problems.push_back({"score", row.id, row.identity, "no hypothesis to score"});
        continue;
      }
      Work w{&row, src_seg.segment(row.source), align::token_texts(tgt_seg->segment(*row.hypothesis)),
             std::nullopt};
      w.tracked = align::token_at(w.src, text::byte_offset(row.source, row.word_span.start));
      if (!w.tracked) {
        result.problems.push_back({"score", row.id, row.identity, "tracked word not tokenized"});
        continue;
      }
      work.push_back(std::move(w));
    }
  }

  std::vector<align::SentencePair> pairs;
  for (const auto& w : work) pairs.emplace_back(align::token_texts(w.src), w.hyp);
  std::optional<align::AlignmentModel> model;
  std::vector<align::Links> links;
  if (!cfg.aligner.command.empty()) {
    align::ExternalAligner ext(cfg.aligner.command);
    links = ext.align(pairs);
  } else if (cfg.aligner.statistical && !pairs.empty()) {
    model = align::train_statistical_aligner(pairs, cfg.aligner.iterations,
                                             {cfg.aligner.diagonal_tension});
  }

  std::vector<std::string> src_words;
  for (const auto& w : work) src_words.push_back(w.src[*w.tracked].text);
  std::vector<align::ExtractionResult> extracted;
  std::vector<std::string> tgt_words;
  for (std::size_t k = 0; k < work.size(); ++k) {
    align::ExtractionSources s{lexicon.empty() ? nullptr : &lexicon, model ? &*model : nullptr,
                               links.empty() ? nullptr : &links[k], cfg.aligner.floor};
    extracted.push_back(align::extract_target_word(s, pairs[k].first, *work[k].tracked, work[k].hyp));
    if (extracted.back().target_word) tgt_words.push_back(*extracted.back().target_word);
  }

  auto unique_scores = [&](const std::string& lang, std::vector<std::string> words) {
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    const auto outcomes = scorer->eas_many(lang, words);
    std::unordered_map<std::string, scoring::Scorer::Outcome> m;
    for (std::size_t i = 0; i < words.size(); ++i) m.emplace(words[i], outcomes[i]);
    return m;
  };
  const auto src_scores = unique_scores(cfg.languages.source, src_words);
  const auto tgt_scores = unique_scores(cfg.languages.target, tgt_words);

  Records out;
  for (const auto& p : ctx.profiles) out[p.key];
  for (std::size_t k = 0; k < work.size(); ++k) {
    const auto& row = *work[k].row;
    const auto& es = src_scores.at(src_words[k]);
    if (!es.value) {
      result.problems.push_back({"score", row.id, row.identity, "source word score: " + es.error});
      continue;
    }
    metrics::TrackedRecord rec{row.id, row.identity, row.source, row.reference, *row.hypothesis,
                               row.word, extracted[k].target_word,
                               std::string(align::to_string(extracted[k].method)), {}};
    switch (extracted[k].status) {
      case align::ExtractionStatus::copy_failure:
        rec.shift = scoring::ShiftRecord::unscored(*es.value, scoring::ScoreStatus::copy_failure);
        break;
      case align::ExtractionStatus::no_alignment:
        rec.shift = scoring::ShiftRecord::unscored(*es.value, scoring::ScoreStatus::alignment_failure);
        break;
      case align::ExtractionStatus::ok: {
        const auto& et = tgt_scores.at(*extracted[k].target_word);
        if (!et.value) {
          result.problems.push_back({"score", row.id, row.identity,
                                     "target word '" + *extracted[k].target_word + "': " + et.error});
          continue;
        }
        rec.shift = scoring::ShiftRecord::scored(*es.value, *et.value);
        break;
      }
    }
    out[row.identity].push_back(std::move(rec));
  }
  return out;
}

metrics::BiasReport report(Context& ctx, const Records& records) {
  const auto& cfg = ctx.config;
  metrics::ReportInputs in;
  in.profiles = ctx.profiles;
  in.records = records;
  if (!cfg.scores.empty()) in.scores = metrics::ingest_scores(cfg.scores);
  in.bleu_scheme = metrics::default_tokenization(cfg.languages.target);
  in.target_language = cfg.languages.target;
  in.shift = scoring::ShiftConfig(cfg.delta);

  if (ctx.profiles.size() >= 2) {
    const auto lexicon = maybe_lexicon(cfg.aligner.lexicon);
    const auto seg = target_segmenter(ctx, lexicon);
    const auto stop = cfg.stopwords.empty() ? std::set<std::string>{} : metrics::load_stopwords(cfg.stopwords);
    std::map<std::string, std::vector<std::string>> outputs;
    for (const auto& [identity, recs] : records)
      for (const auto& r : recs) outputs[identity].push_back(r.hypothesis);
    const auto* neutral = [&]() -> const IdentityProfile* {
      for (const auto& p : ctx.profiles)
        if (p.group == IdentityGroup::neutral) return &p;
      return nullptr;
    }();
    in.keywords = metrics::keyword_diff_sets(outputs, stop, *seg, neutral ? neutral->key : "");
  }

  in.metadata = {
      {"languages", {{"source", cfg.languages.source}, {"target", cfg.languages.target}}},
      {"scorer", {{"kind", cfg.scorer.kind}, {"model", cfg.scorer.model}}},
      {"translator", {{"kind", cfg.translator.kind}, {"model", cfg.translator.model}}},
      {"constraints", {{"moral", cfg.moral}, {"lexical", cfg.lexical}}},
      {"band", {{"lower", cfg.band.lower}, {"upper", cfg.band.upper}}},
      {"aligner",
       {{"lexicon", !cfg.aligner.lexicon.empty()},
        {"method", cfg.aligner.command.empty()
                       ? (cfg.aligner.statistical ? "statistical" : "lexicon-only")
                       : "external"},
        {"iterations", cfg.aligner.iterations},
        {"floor", cfg.aligner.floor}}},
      {"seed", cfg.seed},
  };
  return metrics::aggregate_report(in);
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

template <typename T, typename F>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& items, F&& to) {
  std::string s;
  for (const auto& item : items) s += to(item).dump() + "\n";
  write_text(path, s);
}

template <typename F>
void read_jsonl(const std::filesystem::path& path, F&& each) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing stage output " + path.string() + "; run the earlier stage first");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(line_no, path.string() + ": not JSON");
    each(j);
  }
}

nlohmann::json problem_json(const Problem& p) {
  return {{"stage", p.stage}, {"id", p.id}, {"identity", p.identity}, {"reason", p.reason}};
}

void write_problems(const std::filesystem::path& dir, const StageResult& r) {
  write_jsonl(dir / "problems.jsonl", r.problems, problem_json);
}

std::string file_for(const std::string& identity) { return identity + ".jsonl"; }

void write_expanded(Context& ctx, const corpusgen::ExpansionResult& ex, const StageResult& r) {
  const auto dir = ctx.stage_dir("expanded");
  for (const auto& p : ctx.profiles)
    write_jsonl(dir / file_for(p.key), ex.settings.at(p.key),
                [](const corpusgen::RealizedPair& x) { return corpusgen::to_json(x); });
  write_problems(dir, r);
}

void write_translated(Context& ctx, const Translated& t, const StageResult& r) {
  const auto dir = ctx.stage_dir("translations");
  for (const auto& p : ctx.profiles)
    write_jsonl(dir / file_for(p.key), t.at(p.key),
                [](const TranslatedRow& x) { return to_json(x); });
  write_problems(dir, r);
}

void write_records(Context& ctx, const Records& recs, const StageResult& r) {
  const auto dir = ctx.stage_dir("records");
  for (const auto& p : ctx.profiles)
    write_jsonl(dir / file_for(p.key), recs.at(p.key),
                [](const metrics::TrackedRecord& x) { return metrics::to_json(x); });
  write_problems(dir, r);
}

std::vector<corpusgen::SlottedSentencePair> load_corpus(Context& ctx, StageResult& result) {
  if (ctx.config.corpus.empty()) throw ConfigError("no corpus configured");
  auto loaded = corpusgen::load_slotted(ctx.config.corpus);
  for (const auto& e : loaded.errors)
    result.problems.push_back({"expand", ctx.config.corpus.filename().string(), "", e.what()});
  return std::move(loaded.pairs);
}

void add_manifest(const corpusgen::ExpansionResult& ex, StageResult& result) {
  for (const auto& m : ex.manifest) result.problems.push_back({"expand", m.id, m.identity, m.reason});
}

}  // namespace

StageResult cmd_expand(Context& ctx) {
  StageResult result;
  const auto corpus = load_corpus(ctx, result);
  const auto ex = expand(ctx, corpus);
  add_manifest(ex, result);
  write_expanded(ctx, ex, result);
  ctx.info("expanded " + std::to_string(corpus.size()) + " pairs into " +
           std::to_string(ex.total_pairs()) + " realized pairs over " +
           std::to_string(ctx.profiles.size()) + " identities");
  return result;
}

StageResult cmd_translate(Context& ctx) {
  StageResult result;
  ctx.translator();
  Realized realized;
  for (const auto& p : ctx.profiles) {
    auto& list = realized[p.key];
    read_jsonl(ctx.stage_dir("expanded") / file_for(p.key),
               [&](const nlohmann::json& j) { list.push_back(corpusgen::realized_from_json(j)); });
  }
  const auto t = translate(ctx, realized, result);
  write_translated(ctx, t, result);
  return result;
}

StageResult cmd_score(Context& ctx) {
  StageResult result;
  ctx.scorer();
  Translated t;
  for (const auto& p : ctx.profiles) {
    auto& list = t[p.key];
    read_jsonl(ctx.stage_dir("translations") / file_for(p.key),
               [&](const nlohmann::json& j) { list.push_back(translated_from_json(j)); });
  }
  const auto recs = score(ctx, t, result);
  write_records(ctx, recs, result);
  return result;
}

void write_report_files(const std::filesystem::path& dir, const metrics::BiasReport& rep,
                        const Records& records, const std::vector<IdentityProfile>& profiles) {
  write_text(dir / "report.json", metrics::to_json(rep).dump(2) + "\n");
  write_text(dir / "report.txt", metrics::report_text(rep));
  write_text(dir / "identities.csv", metrics::identity_csv(rep));
  write_text(dir / "groups.csv", metrics::group_csv(rep));
  write_text(dir / "scatter.csv", metrics::scatter_csv(records, profiles));
}

StageResult cmd_report(Context& ctx) {
  StageResult result;
  Records recs;
  for (const auto& p : ctx.profiles) {
    auto& list = recs[p.key];
    read_jsonl(ctx.stage_dir("records") / file_for(p.key),
               [&](const nlohmann::json& j) { list.push_back(metrics::tracked_from_json(j)); });
  }
  const auto rep = report(ctx, recs);
  write_report_files(ctx.stage_dir("report"), rep, recs, ctx.profiles);
  return result;
}

StageResult cmd_run(Context& ctx) {
  StageResult result;
  ctx.translator();
  ctx.scorer();
  const auto corpus = load_corpus(ctx, result);
  const auto ex = expand(ctx, corpus);
  add_manifest(ex, result);
  write_expanded(ctx, ex, result);

  StageResult tr;
  const auto t = translate(ctx, ex.settings, tr);
  write_translated(ctx, t, tr);
  StageResult sc;
  const auto recs = score(ctx, t, sc);
  write_records(ctx, recs, sc);
  const auto rep = report(ctx, recs);
  write_report_files(ctx.stage_dir("report"), rep, recs, ctx.profiles);

  for (auto* r : {&tr, &sc})
    result.problems.insert(result.problems.end(), r->problems.begin(), r->problems.end());
  return result;
}

SeedsResult cmd_seeds(Context& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.seeds.candidates.empty()) throw ConfigError("seeds.candidates is not configured");
  std::shared_ptr<mt::TranslationBackend> translator =
      cfg.seeds.translator
          ? mt::make_translator(*cfg.seeds.translator, ctx.prompt_spec(), cfg.languages)
          : ctx.translator();
  std::shared_ptr<scoring::Scorer> scorer =
      cfg.seeds.scorer ? make_scorer(cfg, *cfg.seeds.scorer, ctx.cache) : ctx.scorer();
  const auto& aligner = cfg.seeds.aligner ? *cfg.seeds.aligner : cfg.aligner;
  const auto lexicon = maybe_lexicon(aligner.lexicon);
  if (lexicon.empty()) throw ConfigError("seed scan needs an aligner lexicon");

  const auto words = seedselect::load_candidates(cfg.seeds.candidates);
  seedselect::ScanBackends b;
  b.translator = translator.get();
  b.prompt = ctx.prompt_spec();
  b.languages = cfg.languages;
  b.batch = {cfg.parallel, ctx.cache};
  b.scorer = scorer.get();
  b.lexicon = &lexicon;
  b.alignment_floor = aligner.floor;
  const auto scan = seedselect::pre_post_scan(words, ctx.profiles, b);
  const auto kept = seedselect::ambiguity_filter(scan.pairs, cfg.band);

  SeedsResult res;
  for (const auto& w : kept) res.seeds.push_back(w.surface);
  for (const auto& f : scan.failures)
    res.stage.problems.push_back({"seeds", f.word, f.identity, f.reason});

  const auto dir = ctx.stage_dir("seeds");
  std::ostringstream csv;
  seedselect::write_scan_csv(csv, scan.pairs);
  write_text(dir / "scan.csv", csv.str());
  std::string list;
  for (const auto& s : res.seeds) list += s + "\n";
  write_text(dir / "seeds.txt", list);
  write_jsonl(dir / "failures.jsonl", res.stage.problems, problem_json);
  ctx.info("kept " + std::to_string(res.seeds.size()) + " of " + std::to_string(words.size()) +
           " candidate words in [" + text::format_double(cfg.band.lower) + ", " +
           text::format_double(cfg.band.upper) + "]");
  return res;
}

namespace {

std::map<std::string, int> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open label file " + path.string());
  const auto rows = csv::read(in);
  if (rows.empty()) throw InputError(path.string() + " is empty");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i)
    col[std::string(text::trim(rows[0].fields[i]))] = i;
  if (!col.contains("id")) throw InputError(path.string() + " lacks an id column");
  const bool labels = col.contains("label");
  if (!labels && !(col.contains("s1") && col.contains("s2")))
    throw InputError(path.string() + " needs a label column or s1,s2 score columns");
  auto number = [&](const csv::Row& r, const char* name) {
    const auto s = std::string(text::trim(r.fields.at(col[name])));
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      throw ParseError(r.line, path.string() + ": '" + s + "' is not a number");
    }
  };
  std::map<std::string, int> out;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (r.fields.size() != rows[0].fields.size())
      throw ParseError(r.line, path.string() + ": wrong number of fields");
    const auto id = std::string(text::trim(r.fields[col["id"]]));
    int label;
    if (labels) {
      const double v = number(r, "label");
      if (v != -1.0 && v != 0.0 && v != 1.0)
        throw ParseError(r.line, path.string() + ": label must be -1, 0 or 1");
      label = static_cast<int>(v);
    } else {
      label = scoring::score_pair_to_label(number(r, "s1"), number(r, "s2"));
    }
    if (!out.emplace(id, label).second) throw ParseError(r.line, path.string() + ": duplicate id " + id);
  }
  return out;
}

}  // namespace

KappaResult cmd_kappa(const std::filesystem::path& a, const std::filesystem::path& b) {
  const auto la = read_labels(a);
  const auto lb = read_labels(b);
  std::vector<int> va;
  std::vector<int> vb;
  std::vector<std::string> missing;
  for (const auto& [id, l] : la) {
    auto it = lb.find(id);
    if (it == lb.end()) {
      missing.push_back(id);
      continue;
    }
    va.push_back(l);
    vb.push_back(it->second);
  }
  for (const auto& [id, _] : lb)
    if (!la.contains(id)) missing.push_back(id);
  if (!missing.empty())
    throw InputError("label files cover different items; unmatched ids: " + text::join(missing, ", "));
  if (va.empty()) throw InputError("no labelled items");
  return {scoring::cohen_kappa(va, vb), va.size()};
}

}  // namespace attishift::pipeline
