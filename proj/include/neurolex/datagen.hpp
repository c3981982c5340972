#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "neurolex/corpus.hpp"
#include "neurolex/jsonl.hpp"
#include "neurolex/lexicon.hpp"
#include "neurolex/tokenizer.hpp"

namespace neurolex::datagen {

// ---- span corruption ------------------------------------------------------

struct MaskedSpan {
  std::size_t sentinel = 0;
  std::size_t offset = 0;  // byte offset in the source paragraph
  std::string text;
};

struct CorruptionOptions {
  double mask_budget = 0.15;
  std::uint64_t seed = 0;
  bool terminal_sentinel = true;
  bool topoff_random = false;
};

struct CorruptionExample {
  std::string id;
  std::string input;
  std::string target;
  std::vector<MaskedSpan> spans;
  double realized_mask_fraction = 0;  // masked pieces / paragraph pieces
  double word_mask_fraction = 0;      // masked words / paragraph words
  std::vector<std::string> flags;     // "shortfall", "topoff"
};

enum class CorruptionStatus { kOk, kSkipped };

struct CorruptionResult {
  CorruptionStatus status = CorruptionStatus::kSkipped;
  CorruptionExample example;
  std::string skip_reason;
};

// Masks lexicon terms only (negation cues excluded). Matches are shuffled
// under the seed and taken greedily while each addition moves the masked
// piece count closer to budget * paragraph pieces. Spans separated only by
// whitespace merge. Paragraphs without terms are SKIPPED.
CorruptionResult corrupt_spans(const std::string& id, std::string_view paragraph,
                               const lexicon::Lexicon& lexicon,
                               const tokenizer::SubwordVocab& vocab,
                               const CorruptionOptions& options = {});

// Builds the example for explicit (offset, length) ranges.
CorruptionExample apply_corruption(const std::string& id, std::string_view paragraph,
                                   std::vector<std::pair<std::size_t, std::size_t>> ranges,
                                   const tokenizer::SubwordVocab& vocab, bool terminal_sentinel);

// Splices target spans back over the input sentinels. Throws DataError
// naming the offending sentinel on any structural mismatch.
std::string reconstruct(std::string_view input, std::string_view target);

// ---- instruction tasks ----------------------------------------------------

enum class Task { kPolish, kQa, kSummarize };
enum class Provenance { kRule, kPseudoLabel };

std::string_view to_string(Task t);            // POLISH, QA, SUMMARIZE
std::string_view to_string(Provenance p);      // RULE, PSEUDO_LABEL
Task parse_task(std::string_view s);
Provenance parse_provenance(std::string_view s);
std::string_view task_prefix(Task t);          // "polish: ", "qa: ", "summarize: "

struct TaskExample {
  Task task = Task::kPolish;
  std::string id;
  std::string input;
  std::string target;
  Provenance provenance = Provenance::kRule;
  std::vector<std::string> flags;
};

// Applies 1-3 seeded degradations (article drop, is/are agreement break,
// auxiliary/function-word drop, preposition drop). Words inside lexicon
// term matches are never touched. Returns the input when nothing applies.
std::string synthesize_noisy(std::string_view sentence, const lexicon::Lexicon& lexicon,
                             std::uint64_t seed);

struct PseudoPair {
  std::string id;
  std::string noisy;
  std::string clean;
};

std::vector<TaskExample> build_polish_pairs(const std::vector<corpus::Paragraph>& paragraphs,
                                            const lexicon::Lexicon& lexicon, std::uint64_t seed,
                                            const std::vector<PseudoPair>& pseudo_pairs = {});

struct QaBuild {
  std::vector<TaskExample> examples;
  std::size_t skipped = 0;  // entries without a definition
};

QaBuild build_qa_pairs(const lexicon::Lexicon& lexicon);

// Sentence with the most PATTERN + LOCALIZATION matches (earliest on ties),
// copied verbatim so negation is preserved.
std::string extractive_summary(std::string_view paragraph, const lexicon::Lexicon& lexicon);

// References are keyed by paragraph id; ids absent from the corpus raise
// DataError listing them.
std::vector<TaskExample> build_sum_pairs(const std::vector<corpus::Paragraph>& paragraphs,
                                         const lexicon::Lexicon& lexicon,
                                         const std::map<std::string, std::string>* references);

inline constexpr std::size_t kMaxInputTokens = 512;
inline constexpr std::size_t kMaxTargetTokens = 256;

// Keeps the longest prefix with at most `limit` non-whitespace pieces.
std::pair<std::string, bool> truncate_to_tokens(std::string_view text,
                                                const tokenizer::SubwordVocab& vocab,
                                                std::size_t limit);

TaskExample truncate_example(TaskExample example, const tokenizer::SubwordVocab& vocab,
                             std::size_t max_input = kMaxInputTokens,
                             std::size_t max_target = kMaxTargetTokens);

Json to_json(const CorruptionExample& e);
CorruptionExample corruption_from_json(const Json& j);
Json to_json(const TaskExample& e);
TaskExample task_from_json(const Json& j);

// JSONL {"id","target"}
std::map<std::string, std::string> read_references(const std::filesystem::path& path);
// JSONL {"id","input","target"}
std::vector<PseudoPair> read_pseudo_pairs(const std::filesystem::path& path);

}  // namespace neurolex::datagen
