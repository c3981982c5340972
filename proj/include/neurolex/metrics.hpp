#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "neurolex/corpus.hpp"
#include "neurolex/ie.hpp"
#include "neurolex/jsonl.hpp"
#include "neurolex/lexicon.hpp"

namespace neurolex::metrics {

// ---- prediction records -----------------------------------------------------

struct Candidate {
  std::string text;
  double score = 0;
};

struct TokenNll {
  std::string piece;
  double nll = 0;
  std::optional<corpus::SectionKind> section;
};

struct PredictionRecord {
  std::string id;
  std::optional<std::string> output;
  std::vector<Candidate> candidates;  // ranked, scores non-increasing
  std::vector<TokenNll> token_nlls;
  std::map<std::string, double> slot_confidences;
  bool has_candidates = false;
  bool has_nlls = false;
};

// Enforces the record invariants; throws DataError describing the problem.
PredictionRecord record_from_json(const Json& j);
Json to_json(const PredictionRecord& r);
// Errors name the file and 1-based line.
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

// ---- ROUGE-L ----------------------------------------------------------------

struct PrfScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Lower case, ASCII punctuation to space, split on whitespace.
std::vector<std::string> rouge_tokens(std::string_view text);
// Bit-parallel LCS length over token sequences.
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);
PrfScore rouge_l(std::string_view candidate, std::string_view reference);

// ---- facts ------------------------------------------------------------------

// (pattern, localization, laterality, frequency, negated); empty string for
// an absent value.
struct Fact {
  std::string pattern;
  std::string localization;
  std::string laterality;
  std::string frequency;
  bool negated = false;

  auto key() const { return std::tie(pattern, localization, laterality, frequency, negated); }
  bool operator<(const Fact& o) const { return key() < o.key(); }
  bool operator==(const Fact& o) const { return key() == o.key(); }
};

// One fact per (pattern mention x localization) of each sentence, each
// carrying the pattern's own negation state. Duplicates collapse.
std::vector<Fact> extract_facts(std::string_view text, const lexicon::Lexicon& lexicon);

struct FactScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t matched = 0;
  std::size_t contradictions = 0;
  std::size_t candidate_facts = 0;
  std::size_t reference_facts = 0;
};

// Exact tuple matches are true positives. Unmatched facts sharing
// (pattern, localization) with opposite negation pair one-to-one as
// contradictions; each adds one false positive and one false negative on top
// of the unmatched counts. Two fact-free texts score 1.
FactScore fact_score(const std::vector<Fact>& candidate, const std::vector<Fact>& reference);
FactScore fact_f1(std::string_view candidate, std::string_view reference,
                  const lexicon::Lexicon& lexicon);

// Contradictions / candidate fact count; 0 without candidate facts.
double contradiction_rate(std::string_view candidate, std::string_view source,
                          const lexicon::Lexicon& lexicon);

// Canonical terms (negation cues excluded) of the candidate absent from the
// source, over the candidate's term count; 0 when the candidate has none.
double term_intro_rate(std::string_view candidate, std::string_view source,
                       const lexicon::Lexicon& lexicon);
std::set<std::string> term_set(std::string_view text, const lexicon::Lexicon& lexicon);

// ---- perplexity -------------------------------------------------------------

// Token-weighted natural-log accumulator; merging shards equals one pass.
class PerplexityAccumulator {
 public:
  explicit PerplexityAccumulator(std::optional<corpus::SectionKind> filter = std::nullopt)
      : filter_(filter) {}
  void add(const PredictionRecord& record);
  void merge(const PerplexityAccumulator& other);
  std::size_t pieces() const { return pieces_; }
  double total_nll() const { return total_; }
  // Throws DataError when no piece passed the filter.
  double value() const;

 private:
  std::optional<corpus::SectionKind> filter_;
  double total_ = 0;
  double compensation_ = 0;
  std::size_t pieces_ = 0;
};

// Every record must carry token_nlls (DataError otherwise).
double perplexity(const std::vector<PredictionRecord>& records,
                  std::optional<corpus::SectionKind> filter = std::nullopt);

// ---- span reconstruction ----------------------------------------------------

// Record id for the span hidden by sentinel k of example `example_id`.
std::string span_record_id(std::string_view example_id, std::size_t k);

// Case-fold and collapse whitespace.
std::string normalize_span(std::string_view s);

struct TopkResult {
  double accuracy = 0;  // percent
  std::size_t hits = 0;
  std::size_t total = 0;
};

// gold: record id -> original span. A gold span without a record is a miss.
// Throws UsageError for k < 1 and DataError for an empty gold set.
TopkResult topk_accuracy(const std::vector<PredictionRecord>& records,
                         const std::map<std::string, std::string>& gold, std::size_t k);

// ---- calibration ------------------------------------------------------------

struct ReliabilityBin {
  double lower = 0;
  double upper = 0;
  std::size_t count = 0;
  double accuracy = 0;
  double confidence = 0;
};

struct Calibration {
  double ece = 0;
  double mce = 0;
  std::size_t n = 0;
  std::vector<ReliabilityBin> bins;  // non-empty bins only
};

// Equal-width bins; bin index = min(floor(c * bins), bins - 1).
Calibration calibration(const std::vector<std::pair<double, bool>>& points, std::size_t bins = 10);

// One (confidence, correct) pair per slot confidence of each record whose
// id has a gold frame. The predicted frame is parsed from `output`;
// correctness is exact equality of the slot's canonical value set.
std::vector<std::pair<double, bool>> slot_confidence_points(
    const std::vector<PredictionRecord>& records, const std::vector<ie::GoldLabel>& gold,
    const lexicon::Lexicon* lexicon);

// ---- report -----------------------------------------------------------------

struct MetricValue {
  double value = 0;
  std::size_t n = 0;
  std::string definition;
};

struct MetricReport {
  std::map<std::string, MetricValue> values;
  Json config = Json::object();
  std::map<std::string, std::string> fingerprints;  // input name -> sha256
  std::vector<std::string> notes;

  void set(const std::string& name, double value, std::size_t n, std::string definition);
  bool has(const std::string& name) const { return values.count(name) > 0; }
  double get(const std::string& name) const { return values.at(name).value; }
  Json to_json() const;
  // Sorted keys, fixed indentation, trailing newline.
  std::string serialize() const;
};

}  // namespace neurolex::metrics
