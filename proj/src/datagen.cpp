#include "neurolex/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "neurolex/error.hpp"
#include "neurolex/hash.hpp"
#include "neurolex/rng.hpp"
#include "neurolex/text.hpp"

namespace neurolex::datagen {

using lexicon::TermCategory;
using tokenizer::sentinel;

namespace {

bool only_whitespace(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return text::is_ascii_space(c); });
}

struct SentinelHit {
  std::size_t offset;
  std::size_t length;
  std::size_t index;
};

std::vector<SentinelHit> find_sentinels(std::string_view s) {
  std::vector<SentinelHit> out;
  std::size_t pos = 0;
  while ((pos = s.find("<extra_id_", pos)) != std::string_view::npos) {
    const std::size_t close = s.find('>', pos);
    if (close == std::string_view::npos) break;
    if (auto k = tokenizer::parse_sentinel(s.substr(pos, close + 1 - pos))) {
      out.push_back({pos, close + 1 - pos, *k});
      pos = close + 1;
    } else {
      ++pos;
    }
  }
  return out;
}

std::string match_case(std::string_view replacement, std::string_view original) {
  std::string out(replacement);
  if (!out.empty() && !original.empty() && original[0] >= 'A' && original[0] <= 'Z') {
    out[0] = text::ascii_upper(out[0]);
  }
  return out;
}

}  // namespace

CorruptionExample apply_corruption(const std::string& id, std::string_view paragraph,
                                   std::vector<std::pair<std::size_t, std::size_t>> ranges,
                                   const tokenizer::SubwordVocab& vocab, bool terminal_sentinel) {
  std::sort(ranges.begin(), ranges.end());
  // Merge ranges that touch or are separated only by whitespace.
  std::vector<std::pair<std::size_t, std::size_t>> merged;  // [begin, end)
  for (const auto& [off, len] : ranges) {
    const std::size_t end = off + len;
    if (!merged.empty() && off >= merged.back().second &&
        only_whitespace(paragraph.substr(merged.back().second, off - merged.back().second))) {
      merged.back().second = std::max(merged.back().second, end);
      continue;
    }
    if (!merged.empty() && off < merged.back().second) {
      merged.back().second = std::max(merged.back().second, end);
      continue;
    }
    merged.emplace_back(off, end);
  }

  CorruptionExample ex;
  ex.id = id;
  std::size_t last = 0;
  std::size_t masked_pieces = 0, masked_words = 0;
  for (std::size_t k = 0; k < merged.size(); ++k) {
    const auto [b, e] = merged[k];
    const std::string span(paragraph.substr(b, e - b));
    ex.input.append(paragraph.substr(last, b - last));
    ex.input.append(sentinel(k));
    if (k) ex.target.push_back(' ');
    ex.target.append(sentinel(k));
    ex.target.push_back(' ');
    ex.target.append(span);
    ex.spans.push_back({k, b, span});
    masked_pieces += vocab.count_tokens(span);
    masked_words += text::split_whitespace(span).size();
    last = e;
  }
  ex.input.append(paragraph.substr(last));
  if (terminal_sentinel) {
    if (!ex.target.empty()) ex.target.push_back(' ');
    ex.target.append(sentinel(merged.size()));
  }
  const std::size_t total_pieces = vocab.count_tokens(paragraph);
  const std::size_t total_words = text::split_whitespace(paragraph).size();
  ex.realized_mask_fraction =
      total_pieces ? static_cast<double>(masked_pieces) / static_cast<double>(total_pieces) : 0.0;
  ex.word_mask_fraction =
      total_words ? static_cast<double>(masked_words) / static_cast<double>(total_words) : 0.0;
  return ex;
}

CorruptionResult corrupt_spans(const std::string& id, std::string_view paragraph,
                               const lexicon::Lexicon& lexicon,
                               const tokenizer::SubwordVocab& vocab,
                               const CorruptionOptions& options) {
  if (!(options.mask_budget > 0.0 && options.mask_budget < 1.0)) {
    throw UsageError("mask budget must lie in (0, 1)");
  }
  CorruptionResult result;
  if (text::trim(paragraph).empty()) {
    result.skip_reason = "empty paragraph";
    return result;
  }
  if (paragraph.find("<extra_id_") != std::string_view::npos) {
    result.skip_reason = "paragraph contains sentinel text";
    return result;
  }
  std::vector<lexicon::TermMatch> matches;
  for (auto& m : lexicon::find_terms(paragraph, lexicon)) {
    if (lexicon.entry(m.entry).category != TermCategory::kNegationCue) matches.push_back(std::move(m));
  }
  if (matches.empty()) {
    result.skip_reason = "no term matches";
    return result;
  }
  const std::size_t total = vocab.count_tokens(paragraph);
  const double target = options.mask_budget * static_cast<double>(total);

  std::vector<std::size_t> pieces(matches.size());
  std::size_t available = 0;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    pieces[i] = vocab.count_tokens(paragraph.substr(matches[i].offset, matches[i].length));
    available += pieces[i];
  }

  std::vector<std::size_t> order(matches.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(hash::derive_seed(options.seed, paragraph));
  rng.shuffle(order);

  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::vector<bool> taken(paragraph.size(), false);
  double selected = 0;
  for (std::size_t i : order) {
    if (selected >= target) break;
    const double p = static_cast<double>(pieces[i]);
    const bool fits = selected + p <= target;
    const bool closer = (selected + p - target) < (target - selected);
    if (!fits && !closer) continue;
    ranges.emplace_back(matches[i].offset, matches[i].length);
    for (std::size_t c = matches[i].offset; c < matches[i].end(); ++c) taken[c] = true;
    selected += p;
  }
  if (ranges.empty()) {
    // Budget smaller than every term: mask the cheapest one rather than none.
    std::size_t best = order.front();
    for (std::size_t i : order) {
      if (pieces[i] < pieces[best]) best = i;
    }
    ranges.emplace_back(matches[best].offset, matches[best].length);
    for (std::size_t c = matches[best].offset; c < matches[best].end(); ++c) taken[c] = true;
    selected += static_cast<double>(pieces[best]);
  }

  std::vector<std::string> flags;
  if (static_cast<double>(available) < target) {
    flags.emplace_back("shortfall");
    if (options.topoff_random) {
      // Random whole-word spans outside the selected terms.
      std::vector<std::pair<std::size_t, std::size_t>> words;
      std::size_t i = 0;
      while (i < paragraph.size()) {
        while (i < paragraph.size() && text::is_ascii_space(paragraph[i])) ++i;
        std::size_t j = i;
        while (j < paragraph.size() && !text::is_ascii_space(paragraph[j])) ++j;
        if (j > i) {
          bool free = true;
          for (std::size_t c = i; c < j; ++c) free = free && !taken[c];
          if (free) words.emplace_back(i, j - i);
        }
        i = j;
      }
      rng.shuffle(words);
      bool added = false;
      for (const auto& [off, len] : words) {
        if (selected >= target) break;
        const double p = static_cast<double>(vocab.count_tokens(paragraph.substr(off, len)));
        if (selected + p - target >= target - selected) continue;
        ranges.emplace_back(off, len);
        selected += p;
        added = true;
      }
      if (added) flags.emplace_back("topoff");
    }
  }

  result.status = CorruptionStatus::kOk;
  result.example = apply_corruption(id, paragraph, std::move(ranges), vocab, options.terminal_sentinel);
  result.example.flags = std::move(flags);
  return result;
}

std::string reconstruct(std::string_view input, std::string_view target) {
  const std::vector<SentinelHit> in = find_sentinels(input);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i].index != i) {
      throw DataError("input sentinel " + sentinel(in[i].index) + " out of order (expected " +
                      sentinel(i) + ")");
    }
  }
  const std::vector<SentinelHit> tg = find_sentinels(target);
  if (tg.empty() && !text::trim(target).empty()) {
    throw DataError("target has text but no sentinel");
  }
  if (!tg.empty() && !text::trim(target.substr(0, tg.front().offset)).empty()) {
    throw DataError("target has text before " + sentinel(tg.front().index));
  }
  std::vector<std::string> spans;
  for (std::size_t i = 0; i < tg.size(); ++i) {
    if (tg[i].index != i) {
      throw DataError("target sentinel " + sentinel(tg[i].index) + " out of order (expected " +
                      sentinel(i) + ")");
    }
    const std::size_t b = tg[i].offset + tg[i].length;
    const std::size_t e = i + 1 < tg.size() ? tg[i + 1].offset : target.size();
    std::string_view span = target.substr(b, e - b);
    if (!span.empty() && span.front() == ' ') span.remove_prefix(1);
    if (!span.empty() && span.back() == ' ') span.remove_suffix(1);
    if (i >= in.size()) {
      if (i > in.size() || !text::trim(span).empty() || i + 1 != tg.size()) {
        throw DataError("target sentinel " + sentinel(tg[i].index) + " has no counterpart in input");
      }
      break;  // terminal sentinel
    }
    spans.emplace_back(span);
  }
  if (spans.size() < in.size()) {
    throw DataError("input sentinel " + sentinel(spans.size()) + " missing from target");
  }
  std::string out;
  std::size_t last = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out.append(input.substr(last, in[i].offset - last));
    out.append(spans[i]);
    last = in[i].offset + in[i].length;
  }
  out.append(input.substr(last));
  return out;
}

// ---- tasks ------------------------------------------------------------------

std::string_view to_string(Task t) {
  switch (t) {
    case Task::kPolish: return "POLISH";
    case Task::kQa: return "QA";
    case Task::kSummarize: return "SUMMARIZE";
  }
  return "POLISH";
}

std::string_view to_string(Provenance p) {
  return p == Provenance::kRule ? "RULE" : "PSEUDO_LABEL";
}

Task parse_task(std::string_view s) {
  const std::string u = text::to_upper(s);
  if (u == "POLISH") return Task::kPolish;
  if (u == "QA") return Task::kQa;
  if (u == "SUMMARIZE") return Task::kSummarize;
  throw DataError("unknown task \"" + std::string(s) + "\"");
}

Provenance parse_provenance(std::string_view s) {
  const std::string u = text::to_upper(s);
  if (u == "RULE") return Provenance::kRule;
  if (u == "PSEUDO_LABEL") return Provenance::kPseudoLabel;
  throw DataError("unknown provenance \"" + std::string(s) + "\"");
}

std::string_view task_prefix(Task t) {
  switch (t) {
    case Task::kPolish: return "polish: ";
    case Task::kQa: return "qa: ";
    case Task::kSummarize: return "summarize: ";
  }
  return "";
}

std::string synthesize_noisy(std::string_view sentence, const lexicon::Lexicon& lexicon,
                             std::uint64_t seed) {
  static const std::set<std::string> kArticles = {"the", "a", "an"};
  static const std::set<std::string> kFunction = {"is", "are", "was", "were", "been",
                                                  "being", "there", "which", "that"};
  static const std::set<std::string> kPrepositions = {
      "over", "in", "on", "at", "of", "with", "during", "from", "throughout", "within", "across", "by"};
  static const std::map<std::string, std::string> kAgreement = {
      {"is", "are"}, {"are", "is"}, {"was", "were"}, {"were", "was"}};

  struct Word {
    std::string text;
    bool locked;
  };
  std::vector<Word> words;
  const auto matches = lexicon::find_terms(sentence, lexicon);
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && text::is_ascii_space(sentence[i])) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !text::is_ascii_space(sentence[j])) ++j;
    if (j > i) {
      bool locked = false;
      for (const auto& m : matches) locked = locked || (m.offset < j && i < m.end());
      words.push_back({std::string(sentence.substr(i, j - i)), locked});
    }
    i = j;
  }

  enum Kind { kAgree, kArticle, kFunctionWord, kPreposition };
  const auto eligible = [&](Kind k, const Word& w) {
    if (w.locked) return false;
    const std::string lw = text::to_lower(w.text);
    switch (k) {
      case kAgree: return kAgreement.count(lw) > 0;
      case kArticle: return kArticles.count(lw) > 0;
      case kFunctionWord: return kFunction.count(lw) > 0;
      case kPreposition: return kPrepositions.count(lw) > 0;
    }
    return false;
  };
  std::vector<Kind> applicable;
  for (Kind k : {kAgree, kArticle, kFunctionWord, kPreposition}) {
    if (std::any_of(words.begin(), words.end(), [&](const Word& w) { return eligible(k, w); })) {
      applicable.push_back(k);
    }
  }
  if (applicable.empty()) return std::string(sentence);

  Rng rng(seed);
  rng.shuffle(applicable);
  const std::size_t count = std::min<std::size_t>(1 + rng.below(3), applicable.size());
  std::vector<Kind> chosen(applicable.begin(), applicable.begin() + static_cast<long>(count));
  std::sort(chosen.begin(), chosen.end());

  for (Kind k : chosen) {
    if (k == kAgree) {
      for (Word& w : words) {
        if (eligible(kAgree, w)) {
          w.text = match_case(kAgreement.at(text::to_lower(w.text)), w.text);
          break;
        }
      }
      continue;
    }
    std::vector<Word> kept;
    for (Word& w : words) {
      if (!eligible(k, w)) kept.push_back(std::move(w));
    }
    words = std::move(kept);
  }
  std::vector<std::string> out;
  for (const Word& w : words) out.push_back(w.text);
  return text::join(out, " ");
}

std::vector<TaskExample> build_polish_pairs(const std::vector<corpus::Paragraph>& paragraphs,
                                            const lexicon::Lexicon& lexicon, std::uint64_t seed,
                                            const std::vector<PseudoPair>& pseudo_pairs) {
  std::vector<TaskExample> out;
  for (const auto& p : paragraphs) {
    const std::string pid = p.id();
    const auto sentences = corpus::split_sentences(p.text);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      const std::string sid = pid + ":s" + std::to_string(s);
      const std::string noisy = synthesize_noisy(sentences[s], lexicon, hash::derive_seed(seed, sid));
      if (noisy == sentences[s]) continue;
      out.push_back({Task::kPolish, sid, std::string(task_prefix(Task::kPolish)) + noisy,
                     sentences[s], Provenance::kRule, {}});
    }
  }
  for (const auto& pp : pseudo_pairs) {
    std::string input = pp.noisy;
    if (!text::starts_with_ci(input, task_prefix(Task::kPolish))) {
      input = std::string(task_prefix(Task::kPolish)) + input;
    }
    out.push_back({Task::kPolish, pp.id, input, pp.clean, Provenance::kPseudoLabel, {}});
  }
  return out;
}

QaBuild build_qa_pairs(const lexicon::Lexicon& lexicon) {
  QaBuild build;
  for (const auto& e : lexicon.entries()) {
    if (!e.definition || text::trim(*e.definition).empty()) {
      ++build.skipped;
      continue;
    }
    const std::string prefix(task_prefix(Task::kQa));
    build.examples.push_back({Task::kQa, "qa:" + e.canonical + ":0",
                              prefix + "What does " + e.canonical + " indicate in an EEG?",
                              *e.definition, Provenance::kRule, {}});
    build.examples.push_back({Task::kQa, "qa:" + e.canonical + ":1",
                              prefix + "Define " + e.canonical + ".", *e.definition,
                              Provenance::kRule, {}});
  }
  return build;
}

std::string extractive_summary(std::string_view paragraph, const lexicon::Lexicon& lexicon) {
  const auto sentences = corpus::split_sentences(paragraph);
  if (sentences.empty()) return std::string(text::trim(paragraph));
  std::size_t best = 0, best_score = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::size_t score = 0;
    for (const auto& m : lexicon::find_terms(sentences[i], lexicon)) {
      const auto c = lexicon.entry(m.entry).category;
      if (c == TermCategory::kPattern || c == TermCategory::kLocalization) ++score;
    }
    if (score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return sentences[best];
}

std::vector<TaskExample> build_sum_pairs(const std::vector<corpus::Paragraph>& paragraphs,
                                         const lexicon::Lexicon& lexicon,
                                         const std::map<std::string, std::string>* references) {
  if (references) {
    std::set<std::string> ids;
    for (const auto& p : paragraphs) ids.insert(p.id());
    std::vector<std::string> unknown;
    for (const auto& [id, _] : *references) {
      if (!ids.count(id)) unknown.push_back(id);
    }
    if (!unknown.empty()) {
      throw DataError("reference ids not in corpus: " + text::join(unknown, ", "));
    }
  }
  std::vector<TaskExample> out;
  const std::string prefix(task_prefix(Task::kSummarize));
  for (const auto& p : paragraphs) {
    const std::string id = p.id();
    if (references) {
      auto it = references->find(id);
      if (it != references->end()) {
        out.push_back({Task::kSummarize, id, prefix + p.text, it->second, Provenance::kPseudoLabel, {}});
        continue;
      }
    }
    out.push_back({Task::kSummarize, id, prefix + p.text, extractive_summary(p.text, lexicon),
                   Provenance::kRule, {}});
  }
  return out;
}

std::pair<std::string, bool> truncate_to_tokens(std::string_view text_in,
                                                const tokenizer::SubwordVocab& vocab,
                                                std::size_t limit) {
  const std::vector<std::string> pieces = vocab.encode(text_in);
  std::size_t count = 0;
  std::string out;
  for (const auto& p : pieces) {
    if (!only_whitespace(p)) {
      if (count == limit) return {std::string(text::trim(out)), true};
      ++count;
    }
    out.append(p);
  }
  return {std::string(text_in), false};
}

TaskExample truncate_example(TaskExample example, const tokenizer::SubwordVocab& vocab,
                             std::size_t max_input, std::size_t max_target) {
  auto [input, in_cut] = truncate_to_tokens(example.input, vocab, max_input);
  auto [target, tg_cut] = truncate_to_tokens(example.target, vocab, max_target);
  example.input = std::move(input);
  example.target = std::move(target);
  if (in_cut) example.flags.emplace_back("input_truncated");
  if (tg_cut) example.flags.emplace_back("target_truncated");
  return example;
}

Json to_json(const CorruptionExample& e) {
  Json spans = Json::array();
  for (const auto& s : e.spans) spans.push_back({{"k", s.sentinel}, {"offset", s.offset}, {"text", s.text}});
  return {{"id", e.id},
          {"input", e.input},
          {"target", e.target},
          {"spans", spans},
          {"mask_fraction", e.realized_mask_fraction},
          {"word_mask_fraction", e.word_mask_fraction},
          {"flags", e.flags}};
}

CorruptionExample corruption_from_json(const Json& j) {
  CorruptionExample e;
  e.id = require_string(j, "id");
  e.input = require_string(j, "input");
  e.target = require_string(j, "target");
  for (const Json& s : require_field(j, "spans")) {
    e.spans.push_back({s.at("k").get<std::size_t>(), s.at("offset").get<std::size_t>(),
                       s.at("text").get<std::string>()});
  }
  e.realized_mask_fraction = j.value("mask_fraction", 0.0);
  e.word_mask_fraction = j.value("word_mask_fraction", 0.0);
  if (j.contains("flags")) e.flags = j.at("flags").get<std::vector<std::string>>();
  return e;
}

Json to_json(const TaskExample& e) {
  Json j = {{"task", to_string(e.task)},
            {"id", e.id},
            {"input", e.input},
            {"target", e.target},
            {"provenance", to_string(e.provenance)}};
  if (!e.flags.empty()) j["flags"] = e.flags;
  return j;
}

TaskExample task_from_json(const Json& j) {
  TaskExample e;
  e.task = parse_task(require_string(j, "task"));
  e.id = require_string(j, "id");
  e.input = require_string(j, "input");
  e.target = require_string(j, "target");
  e.provenance = parse_provenance(j.value("provenance", std::string("RULE")));
  if (j.contains("flags")) e.flags = j.at("flags").get<std::vector<std::string>>();
  return e;
}

std::map<std::string, std::string> read_references(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t) {
    const std::string id = require_string(j, "id");
    if (!out.emplace(id, require_string(j, "target")).second) {
      throw DataError("duplicate reference id " + id);
    }
  });
  return out;
}

std::vector<PseudoPair> read_pseudo_pairs(const std::filesystem::path& path) {
  std::vector<PseudoPair> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t) {
    out.push_back({require_string(j, "id"), require_string(j, "input"), require_string(j, "target")});
  });
  return out;
}

}  // namespace neurolex::datagen
