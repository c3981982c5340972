#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "neurolex/jsonl.hpp"

namespace neurolex::corpus {

enum class SectionKind { kFindings, kImpression, kHistory, kMedications, kTechnique, kOther };

// Upper-case names: FINDINGS, IMPRESSION, HISTORY, MEDICATIONS, TECHNIQUE, OTHER.
std::string_view to_string(SectionKind kind);
// Accepts the upper-case names case-insensitively; throws DataError otherwise.
SectionKind parse_section_kind(std::string_view name);

struct RawReport {
  std::string id;
  std::string text;
  std::map<std::string, std::string> source_meta;
};

struct Section {
  SectionKind kind = SectionKind::kOther;
  std::string text;
};

struct Report {
  std::string id;
  std::vector<Section> sections;
  std::size_t redaction_count = 0;
};

struct Paragraph {
  std::string report_id;
  SectionKind section = SectionKind::kOther;
  std::size_t index = 0;
  std::string text;

  // "<report_id>:<SECTION>:<index>"
  std::string id() const;
};

struct NormalizeResult {
  std::string text;
  std::size_t invalid_sequences = 0;
};

// Canonical text form: valid UTF-8 in NFC, typographic quotes and dashes
// mapped to ASCII, whitespace runs collapsed, no space before , . ; : ! ?,
// single newlines joined, paragraphs separated by exactly one blank line.
// Idempotent.
NormalizeResult normalize_text_checked(std::string_view raw);
std::string normalize_text(std::string_view raw);

struct ScrubResult {
  std::string text;
  std::size_t redactions = 0;
};

inline constexpr std::string_view kDatePlaceholder = "[DATE]";
inline constexpr std::string_view kIdPlaceholder = "[ID]";
inline constexpr std::string_view kNamePlaceholder = "[NAME]";

// Rule-based PHI scrubber: six date layouts, 6+ digit numbers after record
// keywords (MRN, ID, ...), and capitalised names after Dr./Mr./Ms./Mrs.
// Not a certified de-identifier.
ScrubResult scrub_phi(std::string_view text);

struct SegmentConfig {
  // Heading text (upper case, single spaces) -> kind. Unlisted headings
  // that still match the heading shape become OTHER.
  std::map<std::string, SectionKind> headings;
  std::set<SectionKind> dropped;
  bool scrub = true;

  static SegmentConfig defaults();
};

struct DroppedSection {
  SectionKind kind = SectionKind::kOther;
  std::string heading;
  std::string text;
};

struct SegmentResult {
  Report report;
  std::vector<std::string> headings;  // kept headings, document order
  std::vector<DroppedSection> dropped;
  std::size_t invalid_sequences = 0;
};

// Returns the heading text when `line` starts with an upper-case heading
// followed by a colon (e.g. "IMPRESSION:"), and the remainder of the line.
std::optional<std::pair<std::string, std::string>> match_heading(std::string_view line);

SegmentResult segment_report(const RawReport& raw,
                             const SegmentConfig& config = SegmentConfig::defaults());

std::vector<Paragraph> split_paragraphs(const Report& report);

// Sentence splitter for normalized paragraphs; keeps terminal punctuation.
std::vector<std::string> split_sentences(std::string_view paragraph);

Json to_json(const Report& report);
Report report_from_json(const Json& j);
Json to_json(const Paragraph& p);
Paragraph paragraph_from_json(const Json& j);

// Plain-text file (id = file stem), directory of *.txt files, or JSONL with
// {"id","text","meta"}. Duplicate ids raise DataError.
std::vector<RawReport> read_raw_reports(const std::filesystem::path& path);
std::vector<Paragraph> read_paragraphs(const std::filesystem::path& path);

}  // namespace neurolex::corpus
