#include "neurolex/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "neurolex/error.hpp"
#include "neurolex/hash.hpp"
#include "neurolex/text.hpp"

namespace neurolex::harness {

using lexicon::TermCategory;

std::string_view to_string(Bucket b) {
  switch (b) {
    case Bucket::kTrain: return "TRAIN";
    case Bucket::kValid: return "VALID";
    case Bucket::kTest: return "TEST";
  }
  return "";
}

void SplitRatios::validate() const {
  for (double r : as_array()) {
    if (!(r >= 0.0 && r <= 1.0)) throw UsageError("split ratios must lie in [0, 1]");
  }
  if (std::abs(train + valid + test - 1.0) > 1e-9) throw UsageError("split ratios must sum to 1");
}

std::array<std::size_t, 3> SplitAssignment::counts() const {
  std::array<std::size_t, 3> c{};
  for (const auto& [_, b] : buckets) ++c[static_cast<std::size_t>(b)];
  return c;
}

std::vector<std::string> SplitAssignment::ids(Bucket b) const {
  std::vector<std::string> out;
  for (const auto& [id, bucket] : buckets) {
    if (bucket == b) out.push_back(id);
  }
  return out;
}

Json SplitAssignment::to_json() const {
  Json assign = Json::object();
  for (const auto& [id, b] : buckets) assign[id] = to_string(b);
  const auto c = counts();
  return {{"seed", seed},
          {"mode", mode == SplitMode::kQuota ? "quota" : "threshold"},
          {"ratios", {{"train", ratios.train}, {"valid", ratios.valid}, {"test", ratios.test}}},
          {"counts", {{"TRAIN", c[0]}, {"VALID", c[1]}, {"TEST", c[2]}}},
          {"assignment", assign}};
}

std::vector<std::string> priority_order(const std::vector<std::string>& ids, std::uint64_t seed) {
  std::vector<std::pair<std::uint64_t, std::string>> keyed;
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (seen.insert(id).second) keyed.emplace_back(hash::keyed(id, seed), id);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> out;
  out.reserve(keyed.size());
  for (auto& [_, id] : keyed) out.push_back(std::move(id));
  return out;
}

SplitAssignment split_corpus(const std::vector<std::string>& report_ids, const SplitRatios& ratios,
                             std::uint64_t seed, SplitMode mode) {
  ratios.validate();
  SplitAssignment a;
  a.seed = seed;
  a.ratios = ratios;
  a.mode = mode;
  const auto r = ratios.as_array();
  if (mode == SplitMode::kThreshold) {
    for (const auto& id : report_ids) {
      const double u = static_cast<double>(hash::keyed(id, seed) >> 11) * 0x1.0p-53;
      Bucket b = Bucket::kTest;
      if (u < r[0]) {
        b = Bucket::kTrain;
      } else if (u < r[0] + r[1]) {
        b = Bucket::kValid;
      }
      a.buckets[id] = b;
    }
    return a;
  }
  const std::vector<std::string> order = priority_order(report_ids, seed);
  const std::size_t n = order.size();
  // Largest remainder; ties go to the earlier bucket.
  std::array<std::size_t, 3> quota{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = r[i] * static_cast<double>(n);
    quota[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(quota[i]);
    assigned += quota[i];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 3; ++i) {
      if (rem[i] > rem[best] + 1e-12) best = i;
    }
    ++quota[best];
    rem[best] = -1.0;
    ++assigned;
  }
  std::size_t pos = 0;
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t i = 0; i < quota[b] && pos < n; ++i) a.buckets[order[pos++]] = static_cast<Bucket>(b);
  }
  return a;
}

std::string report_of_paragraph(std::string_view paragraph_id) {
  // Report ids may contain ':'; the last two fields are SECTION and index.
  const std::size_t last = paragraph_id.rfind(':');
  if (last == std::string_view::npos || last == 0) return std::string(paragraph_id);
  const std::size_t prev = paragraph_id.rfind(':', last - 1);
  if (prev == std::string_view::npos) return std::string(paragraph_id);
  return std::string(paragraph_id.substr(0, prev));
}

std::optional<corpus::SectionKind> section_of_paragraph(std::string_view paragraph_id) {
  const std::size_t last = paragraph_id.rfind(':');
  if (last == std::string_view::npos || last == 0) return std::nullopt;
  const std::size_t prev = paragraph_id.rfind(':', last - 1);
  if (prev == std::string_view::npos) return std::nullopt;
  try {
    return corpus::parse_section_kind(paragraph_id.substr(prev + 1, last - prev - 1));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::string> subsample(const std::vector<std::string>& ids, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw UsageError("subsample ratio must lie in (0, 1]");
  std::vector<std::string> order = priority_order(ids, seed);
  const auto take = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(order.size()) - 1e-9));
  order.resize(std::min(take, order.size()));
  return order;
}

// ---- mock model -----------------------------------------------------------------

MockModel::MockModel(const lexicon::Lexicon& lexicon, const tokenizer::SubwordVocab& vocab,
                     const std::vector<std::string>& corpus_texts, std::size_t top_k)
    : lexicon_(lexicon), vocab_(vocab), top_k_(top_k) {
  std::vector<std::size_t> freq(lexicon.size(), 0);
  for (const auto& t : corpus_texts) {
    for (const auto& m : lexicon::find_terms(t, lexicon)) ++freq[m.entry];
  }
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    ranked_[lexicon.entry(i).category].emplace_back(lexicon.entry(i).canonical, freq[i]);
  }
  for (auto& [_, v] : ranked_) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
  }
}

const std::vector<std::pair<std::string, std::size_t>>& MockModel::ranked_terms(TermCategory c) const {
  static const std::vector<std::pair<std::string, std::size_t>> kEmpty;
  auto it = ranked_.find(c);
  return it == ranked_.end() ? kEmpty : it->second;
}

metrics::PredictionRecord MockModel::predict_task(const datagen::TaskExample& example) const {
  metrics::PredictionRecord r;
  r.id = example.id;
  std::string_view body = example.input;
  const std::string_view prefix = datagen::task_prefix(example.task);
  if (text::starts_with_ci(body, prefix)) body.remove_prefix(prefix.size());
  switch (example.task) {
    case datagen::Task::kPolish:
      r.output = std::string(body);
      break;
    case datagen::Task::kSummarize:
      r.output = datagen::extractive_summary(body, lexicon_);
      break;
    case datagen::Task::kQa: {
      std::string term(text::trim(body));
      static constexpr std::string_view kWhat = "What does ";
      static constexpr std::string_view kWhatEnd = " indicate in an EEG?";
      static constexpr std::string_view kDefine = "Define ";
      if (text::starts_with_ci(term, kWhat) && term.size() >= kWhat.size() + kWhatEnd.size() &&
          term.ends_with(kWhatEnd)) {
        term = term.substr(kWhat.size(), term.size() - kWhat.size() - kWhatEnd.size());
      } else if (text::starts_with_ci(term, kDefine)) {
        term = term.substr(kDefine.size());
        if (!term.empty() && term.back() == '.') term.pop_back();
      }
      std::string answer;
      if (auto id = lexicon_.lookup(term)) answer = lexicon_.entry(*id).definition.value_or("");
      r.output = answer;
      break;
    }
  }
  return r;
}

metrics::PredictionRecord MockModel::predict_frame(const std::string& id, std::string_view sentence) const {
  metrics::PredictionRecord r;
  r.id = id;
  r.output = ie::frame_serialize(ie::tag_sentence(sentence, lexicon_));
  r.slot_confidences = {{"laterality", 0.9}, {"localization", 0.8}, {"pattern", 0.8},
                        {"frequency", 0.7},  {"negation", 0.85}};
  return r;
}

std::vector<metrics::PredictionRecord> MockModel::predict_spans(const datagen::CorruptionExample& example) const {
  std::vector<metrics::PredictionRecord> out;
  for (const auto& span : example.spans) {
    metrics::PredictionRecord r;
    r.id = metrics::span_record_id(example.id, span.sentinel);
    r.has_candidates = true;
    const auto matches = lexicon::find_terms(span.text, lexicon_);
    const TermCategory c = matches.empty() ? TermCategory::kGeneral : lexicon_.entry(matches.front().entry).category;
    const auto& ranked = ranked_terms(c);
    for (std::size_t i = 0; i < ranked.size() && i < top_k_; ++i) {
      r.candidates.push_back({ranked[i].first, static_cast<double>(ranked[i].second)});
    }
    out.push_back(std::move(r));
  }
  return out;
}

metrics::PredictionRecord MockModel::score_text(const std::string& id, std::string_view text_in,
                                                std::optional<corpus::SectionKind> section) const {
  metrics::PredictionRecord r;
  r.id = id;
  r.has_nlls = true;
  const double nll = std::log(static_cast<double>(vocab_.size()));
  for (auto& piece : vocab_.encode(text_in)) {
    if (text::trim(piece).empty()) continue;
    r.token_nlls.push_back({std::move(piece), nll, section});
  }
  return r;
}

}  // namespace neurolex::harness
