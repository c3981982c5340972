#include "neurolex/ie.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "neurolex/error.hpp"
#include "neurolex/text.hpp"

namespace neurolex::ie {

using lexicon::TermCategory;
using lexicon::TermMatch;

bool SlotFrame::empty() const {
  return !laterality && localization.empty() && pattern.empty() && !frequency && !negation;
}

std::string_view to_string(Slot s) {
  switch (s) {
    case Slot::kLaterality: return "laterality";
    case Slot::kLocalization: return "localization";
    case Slot::kPattern: return "pattern";
    case Slot::kFrequency: return "frequency";
    case Slot::kNegation: return "negation";
  }
  return "";
}

std::string_view short_name(Slot s) {
  switch (s) {
    case Slot::kLaterality: return "Lat.";
    case Slot::kLocalization: return "Loc.";
    case Slot::kPattern: return "Patt.";
    case Slot::kFrequency: return "Freq.";
    case Slot::kNegation: return "Neg.";
  }
  return "";
}

namespace {

bool inside_match(std::size_t pos, const std::vector<TermMatch>& matches) {
  for (const auto& m : matches) {
    if (pos >= m.offset && pos < m.end()) return true;
  }
  return false;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool word_char(char c) {
  return text::is_word_byte(static_cast<unsigned char>(c)) || c == '-' || c == '\'';
}

void push_unique(std::vector<std::string>& v, std::string s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
}

// Parses digits[.digits] at pos; returns the end position or pos on failure.
std::size_t parse_number(std::string_view s, std::size_t pos, double& value) {
  std::size_t i = pos;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == pos) return pos;
  if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i;
  }
  value = std::stod(std::string(s.substr(pos, i - pos)));
  return i;
}

std::size_t skip_spaces(std::string_view s, std::size_t i) {
  while (i < s.size() && text::is_ascii_space(s[i])) ++i;
  return i;
}

}  // namespace

std::optional<double> extract_hz(std::string_view s, const std::vector<TermMatch>& matches) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_digit(s[i])) continue;
    if (i > 0 && (word_char(s[i - 1]) || s[i - 1] == '.')) continue;
    if (inside_match(i, matches)) continue;
    double value = 0;
    std::size_t j = parse_number(s, i, value);
    std::size_t k = skip_spaces(s, j);
    // Optional range: "3-4 Hz", "3 to 4 Hz".
    std::size_t r = k;
    if (r < s.size() && s[r] == '-') {
      r = skip_spaces(s, r + 1);
    } else if (r + 1 < s.size() && text::ascii_lower(s[r]) == 't' && text::ascii_lower(s[r + 1]) == 'o') {
      r = skip_spaces(s, r + 2);
    } else {
      r = std::string::npos;
    }
    if (r != std::string::npos) {
      double upper = 0;
      const std::size_t e = parse_number(s, r, upper);
      if (e != r) k = skip_spaces(s, e);
    }
    if (k + 2 <= s.size() && text::ascii_lower(s[k]) == 'h' &&
        text::ascii_lower(s[k + 1]) == 'z' && (k + 2 == s.size() || !word_char(s[k + 2]))) {
      if (value > 0.0 && value <= 200.0) return value;
    }
    i = j;
  }
  return std::nullopt;
}

std::vector<std::size_t> clause_boundaries(std::string_view s, const std::vector<TermMatch>& matches) {
  static const std::set<std::string> kConjunctions = {"and", "but", "or", "nor", "yet", "so"};
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (word_char(c)) {
      std::size_t j = i;
      while (j < s.size() && word_char(s[j])) ++j;
      if (kConjunctions.count(text::to_lower(s.substr(i, j - i))) && !inside_match(i, matches)) {
        out.push_back(i);
      }
      i = j;
      continue;
    }
    bool boundary = c == ',' || c == ';' || c == '!' || c == '?';
    if (c == '.') {
      const bool decimal = i > 0 && i + 1 < s.size() && is_digit(s[i - 1]) && is_digit(s[i + 1]);
      boundary = !decimal;
    }
    if (boundary && !inside_match(i, matches)) out.push_back(i);
    ++i;
  }
  return out;
}

TagDetail tag_sentence_detailed(std::string_view sentence, const lexicon::Lexicon& lexicon) {
  TagDetail d;
  d.matches = lexicon::find_terms(sentence, lexicon);
  const std::vector<std::size_t> bounds = clause_boundaries(sentence, d.matches);

  std::size_t start = 0;
  for (std::size_t b : bounds) {
    d.clauses.emplace_back(start, b);
    start = b;
  }
  d.clauses.emplace_back(start, sentence.size());

  std::optional<std::string> band;
  std::size_t next_bound = 0;
  bool negated = false;
  for (const auto& m : d.matches) {
    while (next_bound < bounds.size() && bounds[next_bound] <= m.offset) {
      negated = false;
      ++next_bound;
    }
    const auto& entry = lexicon.entry(m.entry);
    switch (entry.category) {
      case TermCategory::kNegationCue:
        negated = !negated;
        d.cues.push_back({m.offset, m.length, next_bound});
        break;
      case TermCategory::kPattern:
        d.patterns.push_back({entry.canonical, m.offset, m.length, negated});
        push_unique(d.frame.pattern, entry.canonical);
        if (negated) d.frame.negation = true;
        break;
      case TermCategory::kLaterality:
        if (!d.frame.laterality) d.frame.laterality = entry.canonical;
        break;
      case TermCategory::kLocalization:
        push_unique(d.frame.localization, entry.canonical);
        break;
      case TermCategory::kFrequency:
        if (!band) band = entry.canonical;
        break;
      case TermCategory::kGeneral:
        break;
    }
  }
  if (auto hz = extract_hz(sentence, d.matches)) {
    d.frame.frequency = Frequency{hz, std::nullopt};
  } else if (band) {
    d.frame.frequency = Frequency{std::nullopt, band};
  }
  return d;
}

SlotFrame tag_sentence(std::string_view sentence, const lexicon::Lexicon& lexicon) {
  return tag_sentence_detailed(sentence, lexicon).frame;
}

// ---- serialization ----------------------------------------------------------

OrderedJson frame_to_json(const SlotFrame& f) {
  OrderedJson j = OrderedJson::object();
  j["laterality"] = f.laterality ? OrderedJson(*f.laterality) : OrderedJson(nullptr);
  j["localization"] = f.localization;
  j["pattern"] = f.pattern;
  if (!f.frequency) {
    j["frequency"] = nullptr;
  } else if (f.frequency->hz) {
    j["frequency"] = OrderedJson{{"hz", *f.frequency->hz}};
  } else {
    j["frequency"] = OrderedJson{{"band", f.frequency->band.value_or("")}};
  }
  j["negation"] = f.negation;
  return j;
}

std::string frame_serialize(const SlotFrame& frame) { return frame_to_json(frame).dump(); }

namespace {

struct FlagSet {
  std::vector<std::string> flags;
  void add(std::string_view f) {
    if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.emplace_back(f);
  }
};

std::string canonical_value(const std::string& raw, const lexicon::Lexicon* lexicon, FlagSet& flags) {
  const std::string v(text::trim(raw));
  if (!lexicon) return v;
  if (auto c = lexicon->canonicalize(v)) return *c;
  flags.add(kFlagNoncanonical);
  return v;
}

std::vector<std::string> read_list(const Json& j, const lexicon::Lexicon* lexicon, FlagSet& flags) {
  std::vector<std::string> out;
  if (j.is_null()) return out;
  if (j.is_string()) {
    push_unique(out, canonical_value(j.get<std::string>(), lexicon, flags));
    return out;
  }
  if (!j.is_array()) {
    flags.add(kFlagMalformed);
    return out;
  }
  for (const Json& v : j) {
    if (!v.is_string()) {
      flags.add(kFlagMalformed);
      continue;
    }
    push_unique(out, canonical_value(v.get<std::string>(), lexicon, flags));
  }
  return out;
}

std::optional<Frequency> read_frequency(const Json& j, const lexicon::Lexicon* lexicon, FlagSet& flags) {
  const auto numeric = [&](double hz) -> std::optional<Frequency> {
    if (!(hz > 0.0 && hz <= 200.0)) flags.add(kFlagNoncanonical);
    return Frequency{hz, std::nullopt};
  };
  const auto band = [&](const std::string& s) -> std::optional<Frequency> {
    if (auto hz = extract_hz(s)) return Frequency{hz, std::nullopt};
    if (text::trim(s).empty()) return std::nullopt;
    return Frequency{std::nullopt, canonical_value(s, lexicon, flags)};
  };
  if (j.is_null()) return std::nullopt;
  if (j.is_number()) return numeric(j.get<double>());
  if (j.is_string()) return band(j.get<std::string>());
  if (j.is_object()) {
    if (j.contains("hz") && j.at("hz").is_number()) return numeric(j.at("hz").get<double>());
    if (j.contains("band") && j.at("band").is_string()) return band(j.at("band").get<std::string>());
  }
  flags.add(kFlagMalformed);
  return std::nullopt;
}

}  // namespace

ParsedFrame frame_from_json(const Json& j, const lexicon::Lexicon* lexicon) {
  ParsedFrame out;
  FlagSet flags;
  if (!j.is_object()) {
    out.flags.emplace_back(kFlagMalformed);
    return out;
  }
  if (j.contains("laterality")) {
    const Json& v = j.at("laterality");
    if (v.is_string()) {
      if (!text::trim(v.get<std::string>()).empty()) {
        out.frame.laterality = canonical_value(v.get<std::string>(), lexicon, flags);
      }
    } else if (!v.is_null()) {
      flags.add(kFlagMalformed);
    }
  }
  if (j.contains("localization")) out.frame.localization = read_list(j.at("localization"), lexicon, flags);
  if (j.contains("pattern")) out.frame.pattern = read_list(j.at("pattern"), lexicon, flags);
  if (j.contains("frequency")) out.frame.frequency = read_frequency(j.at("frequency"), lexicon, flags);
  if (j.contains("negation")) {
    const Json& v = j.at("negation");
    if (v.is_boolean()) {
      out.frame.negation = v.get<bool>();
    } else if (v.is_number_integer()) {
      out.frame.negation = v.get<long long>() != 0;
    } else if (v.is_string() && (text::to_lower(v.get<std::string>()) == "true" ||
                                 text::to_lower(v.get<std::string>()) == "false")) {
      out.frame.negation = text::to_lower(v.get<std::string>()) == "true";
    } else if (!v.is_null()) {
      flags.add(kFlagMalformed);
    }
  }
  out.flags = std::move(flags.flags);
  return out;
}

ParsedFrame frame_parse(std::string_view s, const lexicon::Lexicon* lexicon) {
  Json j = Json::parse(s.begin(), s.end(), nullptr, false);
  if (j.is_discarded()) {
    const std::size_t open = s.find('{');
    const std::size_t close = s.rfind('}');
    if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
      const std::string_view inner = s.substr(open, close + 1 - open);
      j = Json::parse(inner.begin(), inner.end(), nullptr, false);
    }
  }
  if (j.is_discarded() || !j.is_object()) {
    ParsedFrame out;
    out.flags.emplace_back(kFlagMalformed);
    return out;
  }
  return frame_from_json(j, lexicon);
}

// ---- records ----------------------------------------------------------------

std::string_view to_string(LabelSource s) { return s == LabelSource::kWeak ? "WEAK" : "HUMAN"; }

LabelSource parse_label_source(std::string_view s) {
  const std::string u = text::to_upper(s);
  if (u == "WEAK") return LabelSource::kWeak;
  if (u == "HUMAN") return LabelSource::kHuman;
  throw DataError("unknown label source \"" + std::string(s) + "\"");
}

OrderedJson to_json(const FrameRecord& r) {
  OrderedJson j;
  j["id"] = r.id;
  const OrderedJson frame = frame_to_json(r.frame);
  for (const auto& [k, v] : frame.items()) j[k] = v;
  j["flags"] = r.flags;
  return j;
}

OrderedJson to_json(const GoldLabel& g) {
  OrderedJson j;
  j["id"] = g.id;
  if (!g.text.empty()) j["text"] = g.text;
  const OrderedJson frame = frame_to_json(g.frame);
  for (const auto& [k, v] : frame.items()) j[k] = v;
  j["source"] = to_string(g.source);
  return j;
}

std::vector<FrameRecord> read_frames(const std::filesystem::path& path, const lexicon::Lexicon* lexicon) {
  std::vector<FrameRecord> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t) {
    FrameRecord r;
    r.id = require_string(j, "id");
    ParsedFrame p = frame_from_json(j, lexicon);
    r.frame = std::move(p.frame);
    r.flags = std::move(p.flags);
    if (j.contains("flags") && j.at("flags").is_array()) {
      for (const Json& f : j.at("flags")) {
        if (f.is_string() && std::find(r.flags.begin(), r.flags.end(), f.get<std::string>()) == r.flags.end()) {
          r.flags.push_back(f.get<std::string>());
        }
      }
    }
    out.push_back(std::move(r));
  });
  return out;
}

GoldLabel gold_from_json(const Json& j, const lexicon::Lexicon* lexicon) {
  GoldLabel g;
  g.id = require_string(j, "id");
  ParsedFrame p = frame_from_json(j, lexicon);
  if (std::find(p.flags.begin(), p.flags.end(), kFlagMalformed) != p.flags.end()) {
    throw DataError("malformed gold frame for " + g.id);
  }
  g.frame = std::move(p.frame);
  g.source = parse_label_source(j.value("source", std::string("HUMAN")));
  g.text = j.value("text", std::string());
  return g;
}

std::vector<GoldLabel> read_gold(const std::filesystem::path& path, const lexicon::Lexicon* lexicon) {
  std::vector<GoldLabel> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t) { out.push_back(gold_from_json(j, lexicon)); });
  return out;
}

// ---- scoring ----------------------------------------------------------------

Prf Prf::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf p;
  p.tp = tp;
  p.fp = fp;
  p.fn = fn;
  if (tp + fp + fn == 0) {
    p.precision = p.recall = p.f1 = 1.0;
    return p;
  }
  const double t = static_cast<double>(tp);
  p.precision = tp + fp ? t / static_cast<double>(tp + fp) : 0.0;
  p.recall = tp + fn ? t / static_cast<double>(tp + fn) : 0.0;
  p.f1 = tp ? 2.0 * t / static_cast<double>(2 * tp + fp + fn) : 0.0;
  return p;
}

Json SlotScores::to_json() const {
  Json j = Json::object();
  for (Slot s : kSlots) {
    const Prf& p = (*this)[s];
    j[std::string(to_string(s))] = {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1},
                                    {"tp", p.tp},               {"fp", p.fp},         {"fn", p.fn}};
  }
  j["macro_f1"] = macro_f1;
  j["n"] = n;
  return j;
}

std::string format_hz(double hz) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g Hz", hz);
  return buf;
}

std::vector<std::string> slot_values(const SlotFrame& f, Slot slot, const lexicon::Lexicon* lexicon) {
  const auto canon = [&](const std::string& v) {
    std::string s(text::trim(v));
    if (lexicon) {
      if (auto c = lexicon->canonicalize(s)) s = *c;
    }
    return text::to_lower(s);
  };
  std::vector<std::string> out;
  switch (slot) {
    case Slot::kLaterality:
      if (f.laterality) push_unique(out, canon(*f.laterality));
      break;
    case Slot::kLocalization:
      for (const auto& v : f.localization) push_unique(out, canon(v));
      break;
    case Slot::kPattern:
      for (const auto& v : f.pattern) push_unique(out, canon(v));
      break;
    case Slot::kFrequency:
      if (f.frequency) {
        if (f.frequency->hz) {
          out.push_back(text::to_lower(format_hz(*f.frequency->hz)));
        } else if (f.frequency->band) {
          out.push_back(canon(*f.frequency->band));
        }
      }
      break;
    case Slot::kNegation:
      if (f.negation) out.emplace_back("negated");
      break;
  }
  return out;
}

SlotScores eval_slots(const std::vector<std::pair<std::string, SlotFrame>>& predictions,
                      const std::vector<GoldLabel>& gold, const lexicon::Lexicon* lexicon) {
  std::map<std::string, const SlotFrame*> gold_by_id;
  for (const auto& g : gold) {
    if (!gold_by_id.emplace(g.id, &g.frame).second) throw DataError("duplicate gold id " + g.id);
  }
  std::map<std::string, const SlotFrame*> pred_by_id;
  for (const auto& [id, frame] : predictions) {
    if (!pred_by_id.emplace(id, &frame).second) throw DataError("duplicate prediction id " + id);
    if (!gold_by_id.count(id)) throw DataError("prediction id " + id + " has no gold label");
  }

  std::array<std::size_t, 5> tp{}, fp{}, fn{};
  const SlotFrame empty;
  for (const auto& [id, g] : gold_by_id) {
    auto it = pred_by_id.find(id);
    const SlotFrame& p = it == pred_by_id.end() ? empty : *it->second;
    for (Slot s : kSlots) {
      const auto idx = static_cast<std::size_t>(s);
      const auto pv = slot_values(p, s, lexicon);
      const auto gv = slot_values(*g, s, lexicon);
      for (const auto& v : pv) {
        if (std::find(gv.begin(), gv.end(), v) != gv.end()) {
          ++tp[idx];
        } else {
          ++fp[idx];
        }
      }
      for (const auto& v : gv) {
        if (std::find(pv.begin(), pv.end(), v) == pv.end()) ++fn[idx];
      }
    }
  }
  SlotScores scores;
  scores.n = gold_by_id.size();
  double sum = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    scores.slots[i] = Prf::from_counts(tp[i], fp[i], fn[i]);
    sum += scores.slots[i].f1;
  }
  scores.macro_f1 = sum / 5.0;
  return scores;
}

}  // namespace neurolex::ie
