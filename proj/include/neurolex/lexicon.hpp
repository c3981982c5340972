#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "neurolex/jsonl.hpp"

namespace neurolex::lexicon {

enum class TermCategory { kLaterality, kLocalization, kPattern, kFrequency, kNegationCue, kGeneral };

// LATERALITY, LOCALIZATION, PATTERN, FREQUENCY, NEGATION_CUE, GENERAL
std::string_view to_string(TermCategory c);
TermCategory parse_category(std::string_view name);

// The five categories every usable lexicon must populate.
inline constexpr TermCategory kRequiredCategories[] = {
    TermCategory::kLaterality, TermCategory::kLocalization, TermCategory::kPattern,
    TermCategory::kFrequency, TermCategory::kNegationCue};

struct TermEntry {
  std::string canonical;
  std::vector<std::string> surfaces;  // lower case; contains lower(canonical)
  TermCategory category = TermCategory::kGeneral;
  std::optional<std::string> definition;
};

using EntryId = std::size_t;

struct TermMatch {
  std::size_t offset = 0;  // byte offset into the searched text
  std::size_t length = 0;  // byte length
  EntryId entry = 0;
  std::string matched_surface;

  std::size_t end() const { return offset + length; }
};

// Case-insensitive, word-boundary anchored trie over surface strings.
// Resolves overlaps greedily: earliest start wins, then the longest surface.
class SurfaceMatcher {
 public:
  struct Hit {
    std::size_t offset;
    std::size_t length;
    std::size_t value;
  };

  // `surface` must already be lower case. Re-adding a surface keeps the
  // first value.
  void add(std::string_view surface, std::size_t value);
  std::vector<Hit> find_all(std::string_view text) const;
  bool empty() const { return terminal_.size() <= 1; }

 private:
  std::uint32_t child(std::uint32_t node, unsigned char byte) const;

  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::vector<std::int64_t> terminal_{-1};  // value per node, -1 if none
};

class Lexicon {
 public:
  Lexicon() = default;
  // Normalises surfaces (lower case, single spaces) and adds the canonical
  // form as a surface. Cross-entry duplicates are tolerated here (first entry
  // wins in the index) and reported by validate_lexicon; load_lexicon rejects
  // them. Throws DataError for empty canonical or surface strings.
  explicit Lexicon(std::vector<TermEntry> entries);

  const std::vector<TermEntry>& entries() const { return entries_; }
  const TermEntry& entry(EntryId id) const { return entries_.at(id); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::optional<EntryId> lookup(std::string_view surface) const;
  // Maps any surface (case-insensitive) to its entry's canonical form.
  std::optional<std::string> canonicalize(std::string_view value) const;
  const SurfaceMatcher& matcher() const { return matcher_; }

 private:
  std::vector<TermEntry> entries_;
  std::map<std::string, EntryId> surface_index_;
  SurfaceMatcher matcher_;
};

// Surface normalisation applied at load: normalize_text, lower case.
std::string normalize_surface(std::string_view s);

// JSONL {"canonical","surfaces","category","definition"?} or 4-column TSV
// (canonical, '|'-separated surfaces, category, definition). Rejects
// duplicate surfaces across entries and unknown categories.
Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon parse_lexicon(std::string_view content, bool tsv, const std::string& origin = "<memory>");

std::filesystem::path default_lexicon_path();

std::vector<TermMatch> find_terms(std::string_view text, const Lexicon& lexicon);

struct DuplicateSurface {
  std::string surface;
  EntryId first = 0;
  EntryId second = 0;
};

struct ValidationReport {
  std::vector<DuplicateSurface> duplicates;
  std::vector<TermCategory> empty_categories;
  std::vector<EntryId> missing_definitions;

  bool ok() const { return duplicates.empty() && empty_categories.empty(); }
  std::string to_text(const Lexicon& lexicon) const;
  Json to_json(const Lexicon& lexicon) const;
};

ValidationReport validate_lexicon(const Lexicon& lexicon);

Json to_json(const TermEntry& entry);

}  // namespace neurolex::lexicon
