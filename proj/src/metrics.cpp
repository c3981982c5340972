#include "neurolex/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <unordered_map>

#include "neurolex/error.hpp"
#include "neurolex/text.hpp"

namespace neurolex::metrics {

using lexicon::TermCategory;

// ---- records ------------------------------------------------------------------

PredictionRecord record_from_json(const Json& j) {
  if (!j.is_object()) throw DataError("prediction record must be an object");
  PredictionRecord r;
  r.id = require_string(j, "id");
  if (j.contains("output") && !j.at("output").is_null()) {
    if (!j.at("output").is_string()) throw DataError("\"output\" must be a string");
    r.output = j.at("output").get<std::string>();
  }
  if (j.contains("candidates") && !j.at("candidates").is_null()) {
    const Json& c = j.at("candidates");
    if (!c.is_array()) throw DataError("\"candidates\" must be an array");
    r.has_candidates = true;
    for (const Json& item : c) {
      Candidate cand;
      if (item.is_array() && item.size() == 2 && item[0].is_string() && item[1].is_number()) {
        cand = {item[0].get<std::string>(), item[1].get<double>()};
      } else if (item.is_object() && item.contains("text") && item.at("text").is_string() &&
                 item.contains("score") && item.at("score").is_number()) {
        cand = {item.at("text").get<std::string>(), item.at("score").get<double>()};
      } else {
        throw DataError("candidate must be {\"text\",\"score\"} or [text, score]");
      }
      if (!std::isfinite(cand.score)) throw DataError("candidate score must be finite");
      if (!r.candidates.empty() && cand.score > r.candidates.back().score) {
        throw DataError("candidate scores must be non-increasing");
      }
      r.candidates.push_back(std::move(cand));
    }
  }
  if (j.contains("token_nlls") && !j.at("token_nlls").is_null()) {
    const Json& t = j.at("token_nlls");
    if (!t.is_array()) throw DataError("\"token_nlls\" must be an array");
    r.has_nlls = true;
    for (const Json& item : t) {
      TokenNll tn;
      if (item.is_array() && item.size() >= 2 && item[0].is_string() && item[1].is_number()) {
        tn.piece = item[0].get<std::string>();
        tn.nll = item[1].get<double>();
        if (item.size() >= 3 && item[2].is_string()) tn.section = corpus::parse_section_kind(item[2].get<std::string>());
      } else if (item.is_object() && item.contains("piece") && item.at("piece").is_string() &&
                 item.contains("nll") && item.at("nll").is_number()) {
        tn.piece = item.at("piece").get<std::string>();
        tn.nll = item.at("nll").get<double>();
        if (item.contains("section") && item.at("section").is_string()) {
          tn.section = corpus::parse_section_kind(item.at("section").get<std::string>());
        }
      } else {
        throw DataError("token_nlls entry must be {\"piece\",\"nll\",\"section\"?} or [piece, nll, section?]");
      }
      if (!std::isfinite(tn.nll) || tn.nll < 0) throw DataError("nll must be finite and >= 0");
      r.token_nlls.push_back(std::move(tn));
    }
  }
  if (j.contains("slot_confidences") && !j.at("slot_confidences").is_null()) {
    const Json& s = j.at("slot_confidences");
    if (!s.is_object()) throw DataError("\"slot_confidences\" must be an object");
    for (const auto& [k, v] : s.items()) {
      if (!v.is_number()) throw DataError("slot confidence for " + k + " must be a number");
      const double c = v.get<double>();
      if (!(c >= 0.0 && c <= 1.0)) throw DataError("slot confidence for " + k + " outside [0, 1]");
      r.slot_confidences[k] = c;
    }
  }
  if (!r.output && !r.has_candidates && !r.has_nlls && r.slot_confidences.empty()) {
    throw DataError("record " + r.id + " has no payload field");
  }
  return r;
}

Json to_json(const PredictionRecord& r) {
  Json j = {{"id", r.id}};
  if (r.output) j["output"] = *r.output;
  if (r.has_candidates || !r.candidates.empty()) {
    Json c = Json::array();
    for (const auto& cand : r.candidates) c.push_back({{"text", cand.text}, {"score", cand.score}});
    j["candidates"] = c;
  }
  if (r.has_nlls || !r.token_nlls.empty()) {
    Json t = Json::array();
    for (const auto& tn : r.token_nlls) {
      Json e = {{"piece", tn.piece}, {"nll", tn.nll}};
      if (tn.section) e["section"] = corpus::to_string(*tn.section);
      t.push_back(e);
    }
    j["token_nlls"] = t;
  }
  if (!r.slot_confidences.empty()) j["slot_confidences"] = r.slot_confidences;
  return j;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  std::vector<PredictionRecord> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t) { out.push_back(record_from_json(j)); });
  return out;
}

// ---- ROUGE-L ------------------------------------------------------------------

std::vector<std::string> rouge_tokens(std::string_view s) {
  std::string folded;
  folded.reserve(s.size());
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    folded.push_back(u < 0x80 && std::ispunct(u) ? ' ' : text::ascii_lower(c));
  }
  return text::split_whitespace(folded);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  const std::size_t m = a.size();
  const std::size_t words = (m + 63) / 64;
  std::unordered_map<std::string_view, std::vector<std::uint64_t>> masks;
  for (std::size_t i = 0; i < m; ++i) {
    auto& mask = masks[a[i]];
    if (mask.empty()) mask.assign(words, 0);
    mask[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (const auto& tok : b) {
    auto it = masks.find(tok);
    if (it == masks.end()) continue;
    const auto& mask = it->second;
    // v = (v + (v & mask)) | (v & ~mask), with carry across words.
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & mask[w];
      const std::uint64_t sum1 = v[w] + u;
      const std::uint64_t c1 = sum1 < v[w] ? 1 : 0;
      const std::uint64_t sum = sum1 + carry;
      const std::uint64_t c2 = sum < sum1 ? 1 : 0;
      carry = c1 | c2;
      v[w] = sum | (v[w] & ~mask[w]);
    }
  }
  std::size_t zeros = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t bits = ~v[w];
    const std::size_t valid = std::min<std::size_t>(64, m - w * 64);
    if (valid < 64) bits &= (std::uint64_t{1} << valid) - 1;
    zeros += static_cast<std::size_t>(std::popcount(bits));
  }
  return zeros;
}

PrfScore rouge_l(std::string_view candidate, std::string_view reference) {
  const auto c = rouge_tokens(candidate);
  const auto r = rouge_tokens(reference);
  PrfScore s;
  if (c.empty() || r.empty()) return s;
  const double lcs = static_cast<double>(lcs_length(c, r));
  if (lcs == 0) return s;
  s.precision = lcs / static_cast<double>(c.size());
  s.recall = lcs / static_cast<double>(r.size());
  s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

// ---- facts --------------------------------------------------------------------

std::vector<Fact> extract_facts(std::string_view text_in, const lexicon::Lexicon& lexicon) {
  std::set<Fact> facts;
  for (const auto& sentence : corpus::split_sentences(text_in)) {
    const ie::TagDetail d = ie::tag_sentence_detailed(sentence, lexicon);
    const auto first = [](const std::vector<std::string>& v) { return v.empty() ? std::string() : v.front(); };
    const std::string lat = first(ie::slot_values(d.frame, ie::Slot::kLaterality));
    const std::string freq = first(ie::slot_values(d.frame, ie::Slot::kFrequency));
    std::vector<std::string> locs = ie::slot_values(d.frame, ie::Slot::kLocalization);
    if (locs.empty()) locs.emplace_back();
    for (const auto& p : d.patterns) {
      for (const auto& loc : locs) facts.insert({text::to_lower(p.canonical), loc, lat, freq, p.negated});
    }
  }
  return {facts.begin(), facts.end()};
}

namespace {

std::size_t count_contradictions(std::vector<Fact> cand_only, std::vector<Fact> ref_only) {
  // Greedy one-to-one pairing in sorted order; both sides are sorted sets.
  std::vector<bool> used(ref_only.size(), false);
  std::size_t n = 0;
  for (const auto& c : cand_only) {
    for (std::size_t i = 0; i < ref_only.size(); ++i) {
      const auto& r = ref_only[i];
      if (!used[i] && r.pattern == c.pattern && r.localization == c.localization &&
          r.negated != c.negated) {
        used[i] = true;
        ++n;
        break;
      }
    }
  }
  return n;
}

}  // namespace

FactScore fact_score(const std::vector<Fact>& candidate, const std::vector<Fact>& reference) {
  const std::set<Fact> c(candidate.begin(), candidate.end());
  const std::set<Fact> r(reference.begin(), reference.end());
  FactScore s;
  s.candidate_facts = c.size();
  s.reference_facts = r.size();
  std::vector<Fact> c_only, r_only;
  std::set_difference(c.begin(), c.end(), r.begin(), r.end(), std::back_inserter(c_only));
  std::set_difference(r.begin(), r.end(), c.begin(), c.end(), std::back_inserter(r_only));
  s.matched = c.size() - c_only.size();
  s.contradictions = count_contradictions(c_only, r_only);
  if (c.empty() && r.empty()) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  const double tp = static_cast<double>(s.matched);
  const double fp = static_cast<double>(c_only.size() + s.contradictions);
  const double fn = static_cast<double>(r_only.size() + s.contradictions);
  s.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  s.f1 = tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
  return s;
}

FactScore fact_f1(std::string_view candidate, std::string_view reference, const lexicon::Lexicon& lexicon) {
  return fact_score(extract_facts(candidate, lexicon), extract_facts(reference, lexicon));
}

double contradiction_rate(std::string_view candidate, std::string_view source,
                          const lexicon::Lexicon& lexicon) {
  const FactScore s = fact_f1(candidate, source, lexicon);
  if (s.candidate_facts == 0) return 0.0;
  return static_cast<double>(s.contradictions) / static_cast<double>(s.candidate_facts);
}

std::set<std::string> term_set(std::string_view text_in, const lexicon::Lexicon& lexicon) {
  std::set<std::string> out;
  for (const auto& m : lexicon::find_terms(text_in, lexicon)) {
    const auto& e = lexicon.entry(m.entry);
    if (e.category != TermCategory::kNegationCue) out.insert(e.canonical);
  }
  return out;
}

double term_intro_rate(std::string_view candidate, std::string_view source, const lexicon::Lexicon& lexicon) {
  const auto tc = term_set(candidate, lexicon);
  if (tc.empty()) return 0.0;
  const auto ts = term_set(source, lexicon);
  std::size_t novel = 0;
  for (const auto& t : tc) novel += ts.count(t) ? 0 : 1;
  return static_cast<double>(novel) / static_cast<double>(tc.size());
}

// ---- perplexity ---------------------------------------------------------------

void PerplexityAccumulator::add(const PredictionRecord& record) {
  for (const auto& tn : record.token_nlls) {
    if (filter_ && tn.section != filter_) continue;
    // Neumaier summation keeps sharded and single-pass totals within rounding.
    const double t = total_ + tn.nll;
    if (std::abs(total_) >= std::abs(tn.nll)) {
      compensation_ += (total_ - t) + tn.nll;
    } else {
      compensation_ += (tn.nll - t) + total_;
    }
    total_ = t;
    ++pieces_;
  }
}

void PerplexityAccumulator::merge(const PerplexityAccumulator& other) {
  const double t = total_ + other.total_;
  if (std::abs(total_) >= std::abs(other.total_)) {
    compensation_ += (total_ - t) + other.total_;
  } else {
    compensation_ += (other.total_ - t) + total_;
  }
  total_ = t;
  compensation_ += other.compensation_;
  pieces_ += other.pieces_;
}

double PerplexityAccumulator::value() const {
  if (pieces_ == 0) throw DataError("perplexity: no pieces after section filter");
  return std::exp((total_ + compensation_) / static_cast<double>(pieces_));
}

double perplexity(const std::vector<PredictionRecord>& records, std::optional<corpus::SectionKind> filter) {
  PerplexityAccumulator acc(filter);
  for (const auto& r : records) {
    if (!r.has_nlls && r.token_nlls.empty()) throw DataError("record " + r.id + " has no token_nlls");
    acc.add(r);
  }
  return acc.value();
}

// ---- span reconstruction ------------------------------------------------------

std::string span_record_id(std::string_view example_id, std::size_t k) {
  return std::string(example_id) + "#" + std::to_string(k);
}

std::string normalize_span(std::string_view s) { return text::to_lower(text::collapse_spaces(s)); }

TopkResult topk_accuracy(const std::vector<PredictionRecord>& records,
                         const std::map<std::string, std::string>& gold, std::size_t k) {
  if (k < 1) throw UsageError("top-k requires k >= 1");
  if (gold.empty()) throw DataError("top-k: no gold spans");
  std::map<std::string, const PredictionRecord*> by_id;
  for (const auto& r : records) {
    if (!by_id.emplace(r.id, &r).second) throw DataError("duplicate prediction id " + r.id);
  }
  TopkResult res;
  res.total = gold.size();
  for (const auto& [id, span] : gold) {
    auto it = by_id.find(id);
    if (it == by_id.end()) continue;
    const std::string want = normalize_span(span);
    const auto& cands = it->second->candidates;
    const std::size_t limit = std::min(k, cands.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (normalize_span(cands[i].text) == want) {
        ++res.hits;
        break;
      }
    }
  }
  res.accuracy = 100.0 * static_cast<double>(res.hits) / static_cast<double>(res.total);
  return res;
}

// ---- calibration --------------------------------------------------------------

Calibration calibration(const std::vector<std::pair<double, bool>>& points, std::size_t bins) {
  if (bins == 0) throw UsageError("calibration needs at least one bin");
  if (points.empty()) throw DataError("calibration: no confidence-bearing predictions");
  std::vector<std::size_t> count(bins, 0), correct(bins, 0);
  std::vector<double> conf(bins, 0.0);
  for (const auto& [c, ok] : points) {
    if (!(c >= 0.0 && c <= 1.0)) throw DataError("confidence outside [0, 1]");
    const auto b = std::min(static_cast<std::size_t>(std::floor(c * static_cast<double>(bins))), bins - 1);
    ++count[b];
    correct[b] += ok ? 1 : 0;
    conf[b] += c;
  }
  Calibration cal;
  cal.n = points.size();
  const double n = static_cast<double>(points.size());
  for (std::size_t b = 0; b < bins; ++b) {
    if (!count[b]) continue;
    ReliabilityBin rb;
    rb.lower = static_cast<double>(b) / static_cast<double>(bins);
    rb.upper = static_cast<double>(b + 1) / static_cast<double>(bins);
    rb.count = count[b];
    rb.accuracy = static_cast<double>(correct[b]) / static_cast<double>(count[b]);
    rb.confidence = conf[b] / static_cast<double>(count[b]);
    const double gap = std::abs(rb.accuracy - rb.confidence);
    cal.ece += static_cast<double>(count[b]) / n * gap;
    cal.mce = std::max(cal.mce, gap);
    cal.bins.push_back(rb);
  }
  return cal;
}

std::vector<std::pair<double, bool>> slot_confidence_points(const std::vector<PredictionRecord>& records,
                                                            const std::vector<ie::GoldLabel>& gold,
                                                            const lexicon::Lexicon* lexicon) {
  std::map<std::string, const ie::SlotFrame*> gold_by_id;
  for (const auto& g : gold) gold_by_id.emplace(g.id, &g.frame);
  std::vector<std::pair<double, bool>> out;
  for (const auto& r : records) {
    if (r.slot_confidences.empty()) continue;
    auto it = gold_by_id.find(r.id);
    if (it == gold_by_id.end()) continue;
    const ie::SlotFrame pred = ie::frame_parse(r.output.value_or(""), lexicon).frame;
    for (ie::Slot s : ie::kSlots) {
      auto c = r.slot_confidences.find(std::string(ie::to_string(s)));
      if (c == r.slot_confidences.end()) continue;
      auto pv = ie::slot_values(pred, s, lexicon);
      auto gv = ie::slot_values(*it->second, s, lexicon);
      std::sort(pv.begin(), pv.end());
      std::sort(gv.begin(), gv.end());
      out.emplace_back(c->second, pv == gv);
    }
  }
  return out;
}

// ---- report -------------------------------------------------------------------

void MetricReport::set(const std::string& name, double value, std::size_t n, std::string definition) {
  values[name] = {value, n, std::move(definition)};
}

Json MetricReport::to_json() const {
  Json metrics = Json::object();
  for (const auto& [name, v] : values) {
    metrics[name] = {{"value", v.value}, {"n", v.n}, {"definition", v.definition}};
  }
  return {{"metrics", metrics}, {"config", config}, {"fingerprints", fingerprints}, {"notes", notes}};
}

std::string MetricReport::serialize() const { return to_json().dump(2) + "\n"; }

}  // namespace neurolex::metrics
