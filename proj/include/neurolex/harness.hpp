#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neurolex/corpus.hpp"
#include "neurolex/datagen.hpp"
#include "neurolex/ie.hpp"
#include "neurolex/jsonl.hpp"
#include "neurolex/lexicon.hpp"
#include "neurolex/metrics.hpp"
#include "neurolex/tokenizer.hpp"

namespace neurolex::harness {

// ---- splits -------------------------------------------------------------------

enum class Bucket { kTrain, kValid, kTest };
std::string_view to_string(Bucket b);  // TRAIN, VALID, TEST

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;

  // UsageError unless all are >= 0 and they sum to 1 (within 1e-9).
  void validate() const;
  std::array<double, 3> as_array() const { return {train, valid, test}; }
};

enum class SplitMode {
  kQuota,      // ids ranked by keyed hash, largest-remainder bucket sizes
  kThreshold,  // each id bucketed alone by its keyed hash
};

struct SplitAssignment {
  std::map<std::string, Bucket> buckets;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  SplitMode mode = SplitMode::kQuota;

  std::array<std::size_t, 3> counts() const;
  std::vector<std::string> ids(Bucket b) const;
  Json to_json() const;
};

// Report-level split. Duplicate ids are collapsed. Quota mode gives exact
// largest-remainder sizes; threshold mode makes each assignment depend only
// on (id, seed), so it is stable as the corpus grows.
SplitAssignment split_corpus(const std::vector<std::string>& report_ids, const SplitRatios& ratios,
                             std::uint64_t seed, SplitMode mode = SplitMode::kQuota);

// Paragraph id "report:SECTION:k" -> report id.
std::string report_of_paragraph(std::string_view paragraph_id);
std::optional<corpus::SectionKind> section_of_paragraph(std::string_view paragraph_id);

// ---- subsampling --------------------------------------------------------------

inline constexpr double kLabelRatios[] = {0.01, 0.05, 0.10, 0.25, 1.0};

// Ids in seeded priority order (keyed hash, then id).
std::vector<std::string> priority_order(const std::vector<std::string>& ids, std::uint64_t seed);

// First ceil(ratio * N) ids of the priority order, so smaller ratios nest in
// larger ones. UsageError unless 0 < ratio <= 1.
std::vector<std::string> subsample(const std::vector<std::string>& ids, double ratio, std::uint64_t seed);

// ---- mock model ---------------------------------------------------------------

// Deterministic baseline that exercises every prediction payload.
class MockModel {
 public:
  MockModel(const lexicon::Lexicon& lexicon, const tokenizer::SubwordVocab& vocab,
            const std::vector<std::string>& corpus_texts, std::size_t top_k = 5);

  // POLISH echoes the input, SUMMARIZE extracts, QA returns the definition.
  metrics::PredictionRecord predict_task(const datagen::TaskExample& example) const;
  // Tagger frame as output plus fixed per-slot confidences.
  metrics::PredictionRecord predict_frame(const std::string& id, std::string_view sentence) const;
  // One record per masked span ("<id>#<k>"), candidates are the most frequent
  // corpus terms of the span's category.
  std::vector<metrics::PredictionRecord> predict_spans(const datagen::CorruptionExample& example) const;
  // Uniform ln(V) for every non-whitespace piece of `text`.
  metrics::PredictionRecord score_text(const std::string& id, std::string_view text,
                                       std::optional<corpus::SectionKind> section) const;

  const std::vector<std::pair<std::string, std::size_t>>& ranked_terms(lexicon::TermCategory c) const;

 private:
  const lexicon::Lexicon& lexicon_;
  const tokenizer::SubwordVocab& vocab_;
  std::size_t top_k_;
  std::map<lexicon::TermCategory, std::vector<std::pair<std::string, std::size_t>>> ranked_;
};

}  // namespace neurolex::harness
