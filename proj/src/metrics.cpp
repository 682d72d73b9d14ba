#include "attishift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "attishift/csv.hpp"
#include "attishift/text.hpp"

namespace attishift::metrics {

BleuTokenization default_tokenization(std::string_view language) {
  return align::is_unsegmented_language(language) || language == "ko" ? BleuTokenization::character
                                                                       : BleuTokenization::word;
}

std::vector<std::string> bleu_tokenize(std::string_view s, BleuTokenization scheme) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t begin = pos;
    const char32_t cp = text::decode_utf8(s, pos);
    const auto ch = s.substr(begin, pos - begin);
    if (text::is_space(cp)) {
      flush();
    } else if (text::is_punct(cp) || (scheme == BleuTokenization::character && text::is_cjk(cp))) {
      flush();
      out.emplace_back(ch);
    } else {
      word += ch;
    }
  }
  flush();
  return out;
}

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts ngrams(const std::vector<std::string>& toks, std::size_t n) {
  NgramCounts counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key = toks[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += '\x1f';
      key += toks[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

BleuStats bleu_stats(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                     BleuTokenization scheme) {
  if (hyps.size() != refs.size())
    throw InputError("BLEU needs as many references as hypotheses (" + std::to_string(hyps.size()) +
                     " vs " + std::to_string(refs.size()) + ")");
  if (hyps.empty()) throw InputError("BLEU of an empty corpus");
  BleuStats st;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const auto h = bleu_tokenize(hyps[s], scheme);
    const auto r = bleu_tokenize(refs[s], scheme);
    st.hypothesis_length += h.size();
    st.reference_length += r.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto hc = ngrams(h, n);
      const auto rc = ngrams(r, n);
      for (const auto& [g, c] : hc) {
        st.totals[n - 1] += c;
        if (auto it = rc.find(g); it != rc.end()) st.matches[n - 1] += std::min(c, it->second);
      }
    }
  }
  return st;
}

double bleu_from_stats(const BleuStats& st) {
  if (st.hypothesis_length == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (st.totals[n] == 0) continue;
    const double p = st.matches[n] == 0 ? 1.0 / (2.0 * static_cast<double>(st.totals[n]))
                                        : static_cast<double>(st.matches[n]) /
                                              static_cast<double>(st.totals[n]);
    log_sum += std::log(p);
    ++orders;
  }
  const double c = static_cast<double>(st.hypothesis_length);
  const double r = static_cast<double>(st.reference_length);
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * bp * std::exp(log_sum / orders);
}

double bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
            BleuTokenization scheme) {
  return bleu_from_stats(bleu_stats(hyps, refs, scheme));
}

StrippedPair strip_correct_identity(const std::string& hyp, const std::string& ref,
                                    const std::string& surface) {
  StrippedPair out{hyp, ref, false, false};
  if (surface.empty()) return out;
  const auto at = hyp.find(surface);
  if (at == std::string::npos) return out;
  out.matched = true;
  out.repeated = hyp.find(surface, at + surface.size()) != std::string::npos;
  out.hypothesis.erase(at, surface.size());
  if (const auto r = ref.find(surface); r != std::string::npos) out.reference.erase(r, surface.size());
  return out;
}

std::set<std::string> SegmentScoreTable::metrics() const {
  std::set<std::string> out;
  for (const auto& r : rows) out.insert(r.metric);
  return out;
}

std::set<std::string> SegmentScoreTable::identities() const {
  std::set<std::string> out;
  for (const auto& r : rows) out.insert(r.identity);
  return out;
}

namespace {

struct TableBuilder {
  SegmentScoreTable table;
  std::set<std::tuple<std::string, std::string, std::string>> keys;

  void add(std::size_t row, SegmentScore s) {
    if (s.segment_id.empty() || s.identity.empty() || s.metric.empty())
      throw IngestionError(row, "segment_id, identity and metric must be nonempty");
    if (!std::isfinite(s.value)) throw IngestionError(row, "score value is not finite");
    if (!keys.emplace(s.segment_id, s.identity, s.metric).second)
      throw IngestionError(row, "duplicate score for (" + s.segment_id + ", " + s.identity + ", " +
                                    s.metric + ")");
    table.rows.push_back(std::move(s));
  }
};

double parse_value(std::size_t row, const std::string& s) {
  const auto t = std::string(text::trim(s));
  if (t.empty()) throw IngestionError(row, "empty score value");
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw IngestionError(row, "malformed score value '" + t + "'");
    return v;
  } catch (const std::out_of_range&) {
    throw IngestionError(row, "score value out of range '" + t + "'");
  } catch (const std::invalid_argument&) {
    throw IngestionError(row, "malformed score value '" + t + "'");
  }
}

}  // namespace

SegmentScoreTable ingest_scores_csv(std::istream& in) {
  std::vector<csv::Row> rows;
  try {
    rows = csv::read(in);
  } catch (const ParseError& e) {
    throw IngestionError(e.line(), e.what());
  }
  if (rows.empty()) throw IngestionError(1, "score file has no header");
  const auto& header = rows.front().fields;
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[std::string(text::trim(header[i]))] = i;
  for (const auto* name : {"segment_id", "identity", "metric", "value"})
    if (!col.contains(name))
      throw IngestionError(rows.front().line, std::string("header lacks column '") + name + "'");
  TableBuilder b;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (r.fields.size() != header.size())
      throw IngestionError(r.line, "expected " + std::to_string(header.size()) + " fields, found " +
                                       std::to_string(r.fields.size()));
    b.add(r.line, {std::string(text::trim(r.fields[col["segment_id"]])),
                   std::string(text::trim(r.fields[col["identity"]])),
                   std::string(text::trim(r.fields[col["metric"]])),
                   parse_value(r.line, r.fields[col["value"]])});
  }
  return std::move(b.table);
}

SegmentScoreTable ingest_scores_jsonl(std::istream& in) {
  TableBuilder b;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw IngestionError(line_no, "not a JSON object");
    try {
      const auto& v = j.at("value");
      // nlohmann::json stores NaN as null on output and rejects it on input.
      if (!v.is_number()) throw IngestionError(line_no, "score value is not a finite number");
      b.add(line_no, {j.at("segment_id").get<std::string>(), j.at("identity").get<std::string>(),
                      j.at("metric").get<std::string>(), v.get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw IngestionError(line_no, std::string("schema violation: ") + e.what());
    }
  }
  return std::move(b.table);
}

SegmentScoreTable ingest_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open score file " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return ingest_scores_jsonl(in);
  return ingest_scores_csv(in);
}

nlohmann::json to_json(const TrackedRecord& r) {
  nlohmann::json j{{"id", r.id},
                   {"identity", r.identity},
                   {"src", r.source},
                   {"ref", r.reference},
                   {"hyp", r.hypothesis},
                   {"word", r.word},
                   {"target_word", nullptr},
                   {"method", r.method},
                   {"e_src", r.shift.e_src},
                   {"e_hypo", nullptr},
                   {"status", scoring::to_string(r.shift.status)}};
  if (r.target_word) j["target_word"] = *r.target_word;
  if (r.shift.e_hypo) j["e_hypo"] = *r.shift.e_hypo;
  return j;
}

TrackedRecord tracked_from_json(const nlohmann::json& j) {
  TrackedRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.identity = j.at("identity").get<std::string>();
    r.source = j.at("src").get<std::string>();
    r.reference = j.at("ref").get<std::string>();
    r.hypothesis = j.at("hyp").get<std::string>();
    r.word = j.at("word").get<std::string>();
    if (!j.at("target_word").is_null()) r.target_word = j["target_word"].get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.shift.e_src = j.at("e_src").get<double>();
    if (!j.at("e_hypo").is_null()) r.shift.e_hypo = j["e_hypo"].get<double>();
    r.shift.status = scoring::parse_score_status(j.at("status").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed tracked record: ") + e.what());
  }
  if (!r.shift.consistent())
    throw InputError("tracked record " + r.id + " has a status that contradicts its scores");
  return r;
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) throw AggregationError("mean of an empty sample");
  MeanStd out;
  out.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

namespace {

std::vector<scoring::ShiftRecord> shifts_of(const std::vector<const TrackedRecord*>& records) {
  std::vector<scoring::ShiftRecord> out;
  out.reserve(records.size());
  for (const auto* r : records) out.push_back(r->shift);
  return out;
}

std::optional<double> translation_eas(const std::vector<const TrackedRecord*>& records) {
  std::vector<double> v;
  for (const auto* r : records)
    if (r->shift.e_hypo) v.push_back(*r->shift.e_hypo);
  if (v.empty()) return std::nullopt;
  return scoring::corpus_eas(v);
}

}  // namespace

BiasReport aggregate_report(const ReportInputs& in) {
  if (in.profiles.empty()) throw AggregationError("report needs at least one identity profile");
  std::vector<std::string> gaps;
  for (const auto& p : in.profiles) {
    auto it = in.records.find(p.key);
    if (it == in.records.end() || it->second.empty()) gaps.push_back(p.key + " (no records)");
    if (in.scores && !in.scores->identities().contains(p.key))
      gaps.push_back(p.key + " (no segment scores)");
  }
  for (const auto& [key, _] : in.records)
    if (!find_profile(in.profiles, key)) gaps.push_back(key + " (not a configured identity)");
  if (!gaps.empty()) throw AggregationError("incomplete report inputs: " + text::join(gaps, ", "));

  std::map<std::string, std::map<std::string, std::vector<double>>> quality;  // identity -> metric
  if (in.scores)
    for (const auto& r : in.scores->rows) quality[r.identity][r.metric].push_back(r.value);

  BiasReport rep;
  rep.metadata = in.metadata;
  rep.metadata["delta"] = in.shift.delta();
  rep.metadata["std"] = "population";
  rep.metadata["rates"] = "percent of all records, unscored included";
  rep.metadata["bleu"] = in.with_bleu ? nlohmann::json{
      {"order", 4},
      {"tokenization", in.bleu_scheme == BleuTokenization::character ? "character" : "word"},
      {"smoothing", "floor 1/(2*total) for orders without matches"},
      {"identity_deletion", "exact substring of the target surface"}} : nlohmann::json(nullptr);

  std::map<IdentityGroup, std::vector<const TrackedRecord*>> pooled;
  std::map<IdentityGroup, std::vector<std::string>> members;
  for (const auto& p : in.profiles) {
    const auto& recs = in.records.at(p.key);
    std::vector<const TrackedRecord*> ptrs;
    for (const auto& r : recs) ptrs.push_back(&r);

    IdentityRow row;
    row.identity = p.key;
    row.group = p.group;
    row.records = recs.size();
    std::vector<double> src;
    for (const auto& r : recs) {
      src.push_back(r.shift.e_src);
      switch (r.shift.status) {
        case scoring::ScoreStatus::scored: ++row.scored; break;
        case scoring::ScoreStatus::copy_failure: ++row.copy_failures; break;
        case scoring::ScoreStatus::alignment_failure: ++row.alignment_failures; break;
      }
    }
    row.eas_source = scoring::corpus_eas(src);
    row.eas_translation = translation_eas(ptrs);
    const auto shifts = shifts_of(ptrs);
    const auto rates = scoring::shift_rates(shifts, in.shift);
    row.r_tn = rates.r_tn;
    row.r_tp = rates.r_tp;
    if (auto q = quality.find(p.key); q != quality.end())
      for (const auto& [metric, values] : q->second) row.quality[metric] = mean_std(values);
    if (in.with_bleu) {
      const auto& surface = p.surface_for(in.target_language);
      std::vector<std::string> hyps;
      std::vector<std::string> refs;
      std::size_t matched = 0;
      for (const auto& r : recs) {
        auto s = strip_correct_identity(r.hypothesis, r.reference, surface);
        matched += s.matched ? 1 : 0;
        hyps.push_back(std::move(s.hypothesis));
        refs.push_back(std::move(s.reference));
      }
      row.bleu = bleu(hyps, refs, in.bleu_scheme);
      row.identity_match_rate = static_cast<double>(matched) / static_cast<double>(recs.size());
    }
    if (p.group != IdentityGroup::neutral) {
      pooled[p.group].insert(pooled[p.group].end(), ptrs.begin(), ptrs.end());
      members[p.group].push_back(p.key);
    }
    rep.identities.push_back(std::move(row));
  }

  scoring::GroupRates rates_by[2];
  int gi = 0;
  for (auto g : {IdentityGroup::bg, IdentityGroup::nbg}) {
    if (pooled[g].empty())
      throw AggregationError("group " + std::string(to_string(g)) + " has no identities");
    GroupRow row;
    row.group = g;
    row.members = members[g];
    row.records = pooled[g].size();
    for (const auto* r : pooled[g]) row.scored += r->shift.status == scoring::ScoreStatus::scored;
    row.eas_translation = translation_eas(pooled[g]);
    const auto shifts = shifts_of(pooled[g]);
    const auto rates = scoring::shift_rates(shifts, in.shift);
    row.r_tn = rates.r_tn;
    row.r_tp = rates.r_tp;
    rates_by[gi++] = {row.r_tp, row.r_tn};
    rep.groups.push_back(std::move(row));
  }
  rep.shift_bias_rate = scoring::shift_bias_rate(rates_by[0], rates_by[1]);

  std::map<std::string, std::vector<double>> across;
  for (const auto& row : rep.identities) {
    for (const auto& [metric, ms] : row.quality) across[metric].push_back(ms.mean);
    if (row.bleu) across["bleu"].push_back(*row.bleu);
    if (row.eas_translation) across["eas_translation"].push_back(*row.eas_translation);
  }
  for (const auto& [metric, values] : across) rep.cross_identity[metric] = mean_std(values);
  rep.keywords = in.keywords;
  return rep;
}

std::map<std::string, std::set<std::string>> keyword_diff_sets(
    const std::map<std::string, std::vector<std::string>>& outputs,
    const std::set<std::string>& stopwords, const align::Segmenter& segmenter,
    const std::string& neutral_identity) {
  if (outputs.size() < 2) throw InputError("keyword difference sets need at least two identities");
  std::map<std::string, std::set<std::string>> vocab;
  std::map<std::string, std::size_t> seen_in;  // token -> number of identities using it
  for (const auto& [identity, texts] : outputs) {
    auto& v = vocab[identity];
    for (const auto& t : texts)
      for (const auto& tok : segmenter.segment(t))
        if (!stopwords.contains(tok.text)) v.insert(tok.text);
    for (const auto& tok : v) ++seen_in[tok];
  }
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [identity, v] : vocab) {
    if (identity == neutral_identity) continue;
    auto& diff = out[identity];
    for (const auto& tok : v)
      if (seen_in[tok] == 1) diff.insert(tok);
  }
  return out;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stopwords " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto w = text::trim(line);
    if (w.empty() || w.front() == '#') continue;
    out.emplace(w);
  }
  return out;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}, {"n", m.n}}; }

std::string fixed(const std::optional<double>& v, int digits = 4) {
  return v ? text::format_fixed(*v, digits) : "-";
}

std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], text::utf8_length(r[i]));
    }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += "  ";
      line += r[i];
      if (i + 1 < r.size()) line.append(width[i] - text::utf8_length(r[i]), ' ');
    }
    out += line + "\n";
  }
  return out;
}

std::set<std::string> quality_metrics(const BiasReport& rep) {
  std::set<std::string> out;
  for (const auto& row : rep.identities)
    for (const auto& [m, _] : row.quality) out.insert(m);
  return out;
}

}  // namespace

nlohmann::json to_json(const BiasReport& rep) {
  nlohmann::json j;
  j["metadata"] = rep.metadata;
  auto& ids = j["identities"] = nlohmann::json::array();
  for (const auto& row : rep.identities) {
    nlohmann::json q = nlohmann::json::object();
    for (const auto& [m, ms] : row.quality) q[m] = to_json(ms);
    ids.push_back({{"identity", row.identity},
                   {"group", to_string(row.group)},
                   {"records", row.records},
                   {"scored", row.scored},
                   {"copy_failures", row.copy_failures},
                   {"alignment_failures", row.alignment_failures},
                   {"eas_source", opt(row.eas_source)},
                   {"eas_translation", opt(row.eas_translation)},
                   {"r_tn", row.r_tn},
                   {"r_tp", row.r_tp},
                   {"bleu", opt(row.bleu)},
                   {"identity_match_rate", opt(row.identity_match_rate)},
                   {"quality", q}});
  }
  auto& groups = j["groups"] = nlohmann::json::array();
  for (const auto& g : rep.groups)
    groups.push_back({{"group", to_string(g.group)},
                      {"members", g.members},
                      {"records", g.records},
                      {"scored", g.scored},
                      {"eas_translation", opt(g.eas_translation)},
                      {"r_tn", g.r_tn},
                      {"r_tp", g.r_tp}});
  j["shift_bias_rate"] = rep.shift_bias_rate;
  nlohmann::json cross = nlohmann::json::object();
  for (const auto& [m, ms] : rep.cross_identity) cross[m] = to_json(ms);
  j["cross_identity"] = cross;
  nlohmann::json kw = nlohmann::json::object();
  for (const auto& [id, words] : rep.keywords) kw[id] = words;
  j["keywords"] = kw;
  return j;
}

std::string report_text(const BiasReport& rep) {
  const auto metrics = quality_metrics(rep);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"identity", "group", "n",    "scored", "EAS(src)",
                                  "EAS(mt)",  "R_TN",  "R_TP", "BLEU",   "id-match"};
  for (const auto& m : metrics) header.push_back(m + " mean±std");
  rows.push_back(header);
  for (const auto& r : rep.identities) {
    std::vector<std::string> cells{r.identity,
                                   std::string(to_string(r.group)),
                                   std::to_string(r.records),
                                   std::to_string(r.scored),
                                   fixed(r.eas_source),
                                   fixed(r.eas_translation),
                                   text::format_fixed(r.r_tn, 2),
                                   text::format_fixed(r.r_tp, 2),
                                   fixed(r.bleu, 2),
                                   fixed(r.identity_match_rate, 3)};
    for (const auto& m : metrics) {
      auto it = r.quality.find(m);
      cells.push_back(it == r.quality.end() ? "-"
                                            : text::format_fixed(it->second.mean, 4) + "±" +
                                                  text::format_fixed(it->second.std, 4));
    }
    rows.push_back(std::move(cells));
  }
  std::string out = "Per-identity results\n" + table(rows) + "\n";

  rows = {{"group", "members", "n", "scored", "EAS", "R_TN", "R_TP"}};
  for (const auto& g : rep.groups)
    rows.push_back({std::string(to_string(g.group)), std::to_string(g.members.size()),
                    std::to_string(g.records), std::to_string(g.scored), fixed(g.eas_translation),
                    text::format_fixed(g.r_tn, 2), text::format_fixed(g.r_tp, 2)});
  out += "Groups (neutral excluded)\n" + table(rows) + "\n";
  out += "Shift bias rate: " + text::format_fixed(rep.shift_bias_rate, 2) + "\n\n";

  rows = {{"metric", "mean", "std", "identities"}};
  for (const auto& [m, ms] : rep.cross_identity)
    rows.push_back({m, text::format_fixed(ms.mean, 4), text::format_fixed(ms.std, 4),
                    std::to_string(ms.n)});
  out += "Across identities (population std)\n" + table(rows);

  if (!rep.keywords.empty()) {
    out += "\nKeyword difference sets\n";
    for (const auto& [id, words] : rep.keywords) {
      std::vector<std::string> list(words.begin(), words.end());
      out += id + ": " + (list.empty() ? "-" : text::join(list, ", ")) + "\n";
    }
  }
  return out;
}

std::string identity_csv(const BiasReport& rep) {
  const auto metrics = quality_metrics(rep);
  std::string out =
      "identity,group,records,scored,eas_source,eas_translation,r_tn,r_tp,bleu,identity_match_rate";
  for (const auto& m : metrics) out += "," + csv::quote(m + "_mean") + "," + csv::quote(m + "_std");
  out += "\n";
  auto num = [](const std::optional<double>& v) { return v ? text::format_double(*v) : ""; };
  for (const auto& r : rep.identities) {
    out += csv::quote(r.identity) + "," + std::string(to_string(r.group)) + "," +
           std::to_string(r.records) + "," + std::to_string(r.scored) + "," + num(r.eas_source) +
           "," + num(r.eas_translation) + "," + text::format_double(r.r_tn) + "," +
           text::format_double(r.r_tp) + "," + num(r.bleu) + "," + num(r.identity_match_rate);
    for (const auto& m : metrics) {
      auto it = r.quality.find(m);
      if (it == r.quality.end()) out += ",,";
      else out += "," + text::format_double(it->second.mean) + "," + text::format_double(it->second.std);
    }
    out += "\n";
  }
  return out;
}

std::string group_csv(const BiasReport& rep) {
  std::string out = "group,members,records,scored,eas,r_tn,r_tp,shift_bias_rate\n";
  for (const auto& g : rep.groups)
    out += std::string(to_string(g.group)) + "," + csv::quote(text::join(g.members, ";")) + "," +
           std::to_string(g.records) + "," + std::to_string(g.scored) + "," +
           (g.eas_translation ? text::format_double(*g.eas_translation) : "") + "," +
           text::format_double(g.r_tn) + "," + text::format_double(g.r_tp) + "," +
           text::format_double(rep.shift_bias_rate) + "\n";
  return out;
}

std::string scatter_csv(const std::map<std::string, std::vector<TrackedRecord>>& records,
                        const std::vector<IdentityProfile>& profiles) {
  std::string out = "word,e_source,e_translation,identity,status\n";
  for (const auto& p : profiles) {
    auto it = records.find(p.key);
    if (it == records.end()) continue;
    for (const auto& r : it->second)
      out += csv::quote(r.word) + "," + text::format_double(r.shift.e_src) + "," +
             (r.shift.e_hypo ? text::format_double(*r.shift.e_hypo) : "") + "," +
             csv::quote(r.identity) + "," + std::string(scoring::to_string(r.shift.status)) + "\n";
  }
  return out;
}

}  // namespace attishift::metrics
