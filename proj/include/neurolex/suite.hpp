#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "neurolex/metrics.hpp"

namespace neurolex::suite {

namespace fs = std::filesystem;

// Evaluation groups; each runs when its inputs are present and it is enabled.
//   tokenizer      vocab + corpus
//   ppl            scores
//   topk           corruption + span_predictions
//   ie             ie_gold + ie_predictions
//   calibration    ie_gold + ie_predictions carrying slot_confidences
//   summarization  tasks + task_predictions (ROUGE-L, Fact-F1, BERTScore)
//   faithfulness   tasks + task_predictions (Term-Intro, Contr-Rate)
//   negadv         adversarial + adversarial_predictions
//   dataeff        ie_gold + ratio_predictions
inline const std::set<std::string> kGroups = {"tokenizer", "ppl",          "topk",
                                              "ie",        "calibration",  "summarization",
                                              "faithfulness", "negadv",    "dataeff"};

struct SuiteConfig {
  fs::path out_dir;
  std::optional<fs::path> lexicon;  // default lexicon when unset
  std::optional<fs::path> vocab;
  std::optional<fs::path> corpus;  // paragraphs.jsonl
  std::optional<fs::path> scores;
  std::optional<fs::path> corruption;
  std::optional<fs::path> span_predictions;
  std::optional<fs::path> ie_gold;
  std::optional<fs::path> ie_predictions;
  std::optional<fs::path> tasks;
  std::optional<fs::path> task_predictions;
  std::optional<fs::path> adversarial;
  std::optional<fs::path> adversarial_predictions;
  // Externally computed BERTScore, JSONL {"id","bertscore"}.
  std::optional<fs::path> bertscore;
  std::map<std::string, fs::path> ratio_predictions;  // "0.01" -> IE predictions
  std::set<std::string> enabled;  // empty means every group
  std::size_t calibration_bins = 10;
  std::uint64_t seed = 0;
};

struct SuiteResult {
  metrics::MetricReport report;
  std::string tables;
  std::vector<std::string> ran;  // groups that produced values
};

// Throws DataError when a configured path is missing or an input file is
// schema-invalid (the message names the file and line), UsageError for an
// unknown group.
SuiteResult run_suite(const SuiteConfig& config);

// Writes metrics.json, tables.txt and manifest.json (sha256 of every input
// and output) into config.out_dir.
SuiteResult run_suite_and_write(const SuiteConfig& config);

}  // namespace neurolex::suite
