#include "neurolex/robustness.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "neurolex/error.hpp"
#include "neurolex/hash.hpp"
#include "neurolex/rng.hpp"
#include "neurolex/text.hpp"

namespace neurolex::robustness {

using lexicon::TermCategory;

std::string_view to_string(PerturbKind k) {
  switch (k) {
    case PerturbKind::kCueSwap: return "CUE_SWAP";
    case PerturbKind::kScopeShift: return "SCOPE_SHIFT";
    case PerturbKind::kDoubleNeg: return "DOUBLE_NEG";
  }
  return "";
}

std::string_view to_string(LabelTransform t) { return t == LabelTransform::kPreserve ? "PRESERVE" : "FLIP"; }

PerturbKind parse_kind(std::string_view s) {
  const std::string u = text::to_upper(s);
  for (PerturbKind k : kAllKinds) {
    if (u == to_string(k)) return k;
  }
  throw UsageError("unknown perturbation kind \"" + std::string(s) + "\"");
}

LabelTransform label_transform(PerturbKind k) {
  return k == PerturbKind::kDoubleNeg ? LabelTransform::kFlip : LabelTransform::kPreserve;
}

// ---- swap table ---------------------------------------------------------------

void SwapTable::add(std::string from, std::string to) {
  std::pair<std::string, std::string> p{text::to_lower(text::collapse_spaces(from)),
                                        text::to_lower(text::collapse_spaces(to))};
  if (p.first == p.second) return;
  if (std::find(pairs_.begin(), pairs_.end(), p) == pairs_.end()) pairs_.push_back(std::move(p));
}

SwapTable SwapTable::parse(std::string_view content, const std::string& origin) {
  SwapTable t;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() < 2 || text::trim(cols[0]).empty() || text::trim(cols[1]).empty()) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected from<TAB>to[<TAB>both]");
    }
    t.add(std::string(text::trim(cols[0])), std::string(text::trim(cols[1])));
    if (cols.size() >= 3 && text::to_lower(text::trim(cols[2])) == "both") {
      t.add(std::string(text::trim(cols[1])), std::string(text::trim(cols[0])));
    }
  }
  return t;
}

SwapTable SwapTable::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

std::filesystem::path SwapTable::default_path() {
  return std::filesystem::path(NEUROLEX_DATA_DIR) / "robustness" / "cue_swaps.tsv";
}

SwapTable SwapTable::defaults() {
  SwapTable t;
  t.add("no", "without");
  t.add("without", "no");
  t.add("absence of", "lack of");
  t.add("lack of", "absence of");
  t.add("not", "no evidence of");
  return t;
}

std::vector<std::string> SwapTable::replacements(std::string_view cue) const {
  const std::string key = text::to_lower(text::collapse_spaces(cue));
  std::vector<std::string> out;
  for (const auto& [from, to] : pairs_) {
    if (from == key) out.push_back(to);
  }
  return out;
}

// ---- perturbation -------------------------------------------------------------

namespace {

std::size_t clause_of(const ie::TagDetail& d, std::size_t offset) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < d.clauses.size(); ++i) {
    if (d.clauses[i].first <= offset) idx = i;
  }
  return idx;
}

std::string with_case(std::string replacement, std::string_view original) {
  if (!replacement.empty() && !original.empty() && original[0] >= 'A' && original[0] <= 'Z') {
    replacement[0] = text::ascii_upper(replacement[0]);
  }
  return replacement;
}

struct Site {
  std::size_t cue;      // index into TagDetail::cues
  std::size_t pattern;  // first pattern after the cue in its clause
};

std::vector<Site> effective_sites(const ie::TagDetail& d) {
  std::vector<Site> out;
  for (std::size_t c = 0; c < d.cues.size(); ++c) {
    const auto& cue = d.cues[c];
    const auto same_clause = std::count_if(d.cues.begin(), d.cues.end(),
                                           [&](const ie::CueMention& o) { return o.clause == cue.clause; });
    if (same_clause != 1) continue;
    for (std::size_t p = 0; p < d.patterns.size(); ++p) {
      const auto& pat = d.patterns[p];
      if (pat.offset >= cue.offset + cue.length && clause_of(d, pat.offset) == cue.clause) {
        out.push_back({c, p});
        break;
      }
    }
  }
  return out;
}

const std::map<std::string, std::string>& shift_prefixes() {
  static const std::map<std::string, std::string> m = {
      {"no", "no evidence that"},
      {"without", "without evidence that"},
      {"absence of", "absence of evidence that"},
      {"lack of", "lack of evidence that"},
      {"no evidence of", "no evidence that"},
      {"negative for", "no evidence that"},
  };
  return m;
}

// Length of a trailing "is|are|was|were seen|noted|..." starting at pos.
std::size_t copula_tail(std::string_view s, std::size_t pos) {
  static const std::set<std::string> kCopula = {"is", "are", "was", "were"};
  static const std::set<std::string> kParticiple = {"seen", "noted", "observed", "present", "identified", "evident"};
  const auto word_at = [&](std::size_t i, std::size_t& end) {
    while (i < s.size() && text::is_ascii_space(s[i])) ++i;
    end = i;
    while (end < s.size() && text::is_word_byte(static_cast<unsigned char>(s[end]))) ++end;
    return text::to_lower(s.substr(i, end - i));
  };
  std::size_t e1 = 0, e2 = 0;
  if (!kCopula.count(word_at(pos, e1))) return 0;
  if (!kParticiple.count(word_at(e1, e2))) return 0;
  return e2 - pos;
}

}  // namespace

std::optional<PerturbResult> perturb(std::string_view sentence, const ie::SlotFrame& gold, PerturbKind kind,
                                     const lexicon::Lexicon& lexicon, const SwapTable& swaps,
                                     std::uint64_t seed) {
  const ie::TagDetail d = ie::tag_sentence_detailed(sentence, lexicon);
  std::vector<Site> sites = effective_sites(d);
  const auto cue_text = [&](const Site& s) {
    const auto& c = d.cues[s.cue];
    return text::to_lower(sentence.substr(c.offset, c.length));
  };

  // Filter sites by kind-specific applicability.
  std::vector<Site> usable;
  for (const Site& s : sites) {
    switch (kind) {
      case PerturbKind::kCueSwap:
        if (!swaps.replacements(cue_text(s)).empty()) usable.push_back(s);
        break;
      case PerturbKind::kScopeShift:
        if (shift_prefixes().count(cue_text(s))) usable.push_back(s);
        break;
      case PerturbKind::kDoubleNeg: {
        std::set<std::size_t> negated_clauses;
        for (const auto& p : d.patterns) {
          if (p.negated) negated_clauses.insert(clause_of(d, p.offset));
        }
        if (negated_clauses.size() == 1 && *negated_clauses.begin() == d.cues[s.cue].clause) usable.push_back(s);
        break;
      }
    }
  }
  if (usable.empty()) return std::nullopt;

  Rng rng(hash::derive_seed(seed, std::string(sentence) + "|" + std::string(to_string(kind))));
  const Site site = usable[rng.below(usable.size())];
  const auto& cue = d.cues[site.cue];
  const std::string_view original_cue = sentence.substr(cue.offset, cue.length);
  const std::string cue_lower = text::to_lower(original_cue);

  std::string out;
  switch (kind) {
    case PerturbKind::kCueSwap: {
      const auto options = swaps.replacements(cue_lower);
      const std::string repl = options[rng.below(options.size())];
      out = std::string(sentence.substr(0, cue.offset)) + with_case(repl, original_cue) +
            std::string(sentence.substr(cue.offset + cue.length));
      break;
    }
    case PerturbKind::kScopeShift: {
      const auto& pat = d.patterns[site.pattern];
      const std::size_t pat_end = pat.offset + pat.length;
      const std::size_t tail = copula_tail(sentence, pat_end);
      out = std::string(sentence.substr(0, cue.offset)) +
            with_case(shift_prefixes().at(cue_lower), original_cue) +
            std::string(sentence.substr(cue.offset + cue.length, pat_end - cue.offset - cue.length)) +
            " can be seen" + std::string(sentence.substr(pat_end + tail));
      break;
    }
    case PerturbKind::kDoubleNeg:
      out = std::string(sentence.substr(0, cue.offset)) + with_case("not without", original_cue) +
            std::string(sentence.substr(cue.offset + cue.length));
      break;
  }
  if (out == sentence) return std::nullopt;

  PerturbResult r;
  r.perturbation = {kind, std::string(sentence), std::move(out), label_transform(kind), cue_lower};
  r.gold = gold;
  if (r.perturbation.transform == LabelTransform::kFlip) r.gold.negation = !r.gold.negation;
  return r;
}

std::vector<AdversarialExample> build_adversarial_set(const std::vector<ie::GoldLabel>& sentences,
                                                      const std::vector<PerturbKind>& kinds,
                                                      const lexicon::Lexicon& lexicon,
                                                      const SwapTable& swaps, std::uint64_t seed) {
  std::vector<AdversarialExample> out;
  for (const auto& g : sentences) {
    if (g.text.empty()) throw DataError("gold label " + g.id + " has no sentence text");
    for (PerturbKind k : kinds) {
      auto r = perturb(g.text, g.frame, k, lexicon, swaps, seed);
      if (!r) continue;
      AdversarialExample e;
      e.id = g.id + ":" + std::string(to_string(k));
      e.kind = k;
      e.original_id = g.id;
      e.original = g.text;
      e.input = std::move(r->perturbation.perturbed);
      e.gold = std::move(r->gold);
      e.transform = r->perturbation.transform;
      e.applied_cue = std::move(r->perturbation.applied_cue);
      out.push_back(std::move(e));
    }
  }
  return out;
}

OrderedJson to_json(const AdversarialExample& e) {
  OrderedJson j;
  j["id"] = e.id;
  j["kind"] = to_string(e.kind);
  j["original_id"] = e.original_id;
  j["original"] = e.original;
  j["input"] = e.input;
  j["gold_frame"] = ie::frame_to_json(e.gold);
  j["label_transform"] = to_string(e.transform);
  j["applied_cue"] = e.applied_cue;
  return j;
}

AdversarialExample adversarial_from_json(const Json& j, const lexicon::Lexicon* lexicon) {
  AdversarialExample e;
  e.id = require_string(j, "id");
  e.kind = parse_kind(require_string(j, "kind"));
  e.original_id = require_string(j, "original_id");
  e.original = j.value("original", std::string());
  e.input = require_string(j, "input");
  const auto parsed = ie::frame_from_json(require_field(j, "gold_frame"), lexicon);
  if (std::find(parsed.flags.begin(), parsed.flags.end(), ie::kFlagMalformed) != parsed.flags.end()) {
    throw DataError("malformed gold_frame for " + e.id);
  }
  e.gold = parsed.frame;
  const std::string t = text::to_upper(require_string(j, "label_transform"));
  if (t != "PRESERVE" && t != "FLIP") throw DataError("unknown label_transform " + t);
  e.transform = t == "FLIP" ? LabelTransform::kFlip : LabelTransform::kPreserve;
  e.applied_cue = j.value("applied_cue", std::string());
  return e;
}

std::vector<AdversarialExample> read_adversarial(const std::filesystem::path& path,
                                                 const lexicon::Lexicon* lexicon) {
  std::vector<AdversarialExample> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t) { out.push_back(adversarial_from_json(j, lexicon)); });
  return out;
}

ie::Prf eval_negadv(const std::vector<std::pair<std::string, bool>>& predictions,
                    const std::vector<AdversarialExample>& adversarial) {
  std::map<std::string, bool> gold;
  for (const auto& e : adversarial) {
    if (!gold.emplace(e.id, e.gold.negation).second) throw DataError("duplicate adversarial id " + e.id);
  }
  std::map<std::string, bool> pred;
  for (const auto& [id, neg] : predictions) {
    if (!gold.count(id)) throw DataError("prediction id " + id + " not in adversarial set");
    if (!pred.emplace(id, neg).second) throw DataError("duplicate prediction id " + id);
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& [id, g] : gold) {
    auto it = pred.find(id);
    const bool p = it != pred.end() && it->second;
    if (p && g) ++tp;
    if (p && !g) ++fp;
    if (!p && g) ++fn;
  }
  return ie::Prf::from_counts(tp, fp, fn);
}

}  // namespace neurolex::robustness
