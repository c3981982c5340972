#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "neurolex/jsonl.hpp"
#include "neurolex/lexicon.hpp"

namespace neurolex::ie {

// Either a numeric value in Hz or a band canonical (delta, theta, ...).
struct Frequency {
  std::optional<double> hz;
  std::optional<std::string> band;

  bool operator==(const Frequency&) const = default;
};

struct SlotFrame {
  std::optional<std::string> laterality;
  std::vector<std::string> localization;
  std::vector<std::string> pattern;
  std::optional<Frequency> frequency;
  bool negation = false;

  bool operator==(const SlotFrame&) const = default;
  bool empty() const;
};

enum class Slot { kLaterality, kLocalization, kPattern, kFrequency, kNegation };
inline constexpr std::array<Slot, 5> kSlots = {Slot::kLaterality, Slot::kLocalization,
                                               Slot::kPattern, Slot::kFrequency, Slot::kNegation};
std::string_view to_string(Slot s);  // laterality, localization, ...
std::string_view short_name(Slot s); // Lat., Loc., Patt., Freq., Neg.

// ---- negation scope ---------------------------------------------------------

// Byte offsets of clause boundaries: , ; . ! ? (a period between digits is
// not one) and the whole words and/but/or/nor/yet/so. Boundaries that fall
// inside a term match are ignored.
std::vector<std::size_t> clause_boundaries(std::string_view sentence,
                                           const std::vector<lexicon::TermMatch>& matches);

struct PatternMention {
  std::string canonical;
  std::size_t offset = 0;
  std::size_t length = 0;
  bool negated = false;
};

struct CueMention {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::size_t clause = 0;  // index of the enclosing clause
};

struct TagDetail {
  SlotFrame frame;
  std::vector<lexicon::TermMatch> matches;
  std::vector<PatternMention> patterns;
  std::vector<CueMention> cues;
  std::vector<std::pair<std::size_t, std::size_t>> clauses;  // [begin, end)
};

// Cues scope forward to the next clause boundary; each cue toggles the
// negation state, so two cues in one clause cancel. The frame's negation is
// set when any pattern mention is negated.
TagDetail tag_sentence_detailed(std::string_view sentence, const lexicon::Lexicon& lexicon);
SlotFrame tag_sentence(std::string_view sentence, const lexicon::Lexicon& lexicon);

// First numeric value in (0, 200] followed by "Hz", ranges yield their lower
// end. Positions inside term matches are skipped.
std::optional<double> extract_hz(std::string_view sentence,
                                 const std::vector<lexicon::TermMatch>& matches = {});

// ---- serialization ----------------------------------------------------------

OrderedJson frame_to_json(const SlotFrame& frame);
// Single-line JSON with keys laterality, localization, pattern, frequency,
// negation in that order.
std::string frame_serialize(const SlotFrame& frame);

inline constexpr std::string_view kFlagMalformed = "MALFORMED";
inline constexpr std::string_view kFlagNoncanonical = "NONCANONICAL";

struct ParsedFrame {
  SlotFrame frame;
  std::vector<std::string> flags;
};

// Tolerant reader for model output. Accepts any key order and missing keys,
// tolerates text around a single JSON object. Values are canonicalised
// through the lexicon when given; unknown values are kept and flagged
// NONCANONICAL. Unparseable input yields an empty frame flagged MALFORMED.
ParsedFrame frame_parse(std::string_view text, const lexicon::Lexicon* lexicon = nullptr);
ParsedFrame frame_from_json(const Json& j, const lexicon::Lexicon* lexicon = nullptr);

// ---- records ----------------------------------------------------------------

enum class LabelSource { kWeak, kHuman };
std::string_view to_string(LabelSource s);
LabelSource parse_label_source(std::string_view s);

struct FrameRecord {
  std::string id;
  SlotFrame frame;
  std::vector<std::string> flags;
};

struct GoldLabel {
  std::string id;
  SlotFrame frame;
  LabelSource source = LabelSource::kHuman;
  std::string text;  // optional sentence text
};

OrderedJson to_json(const FrameRecord& r);
OrderedJson to_json(const GoldLabel& g);
std::vector<FrameRecord> read_frames(const std::filesystem::path& path,
                                     const lexicon::Lexicon* lexicon = nullptr);
std::vector<GoldLabel> read_gold(const std::filesystem::path& path,
                                 const lexicon::Lexicon* lexicon = nullptr);
GoldLabel gold_from_json(const Json& j, const lexicon::Lexicon* lexicon = nullptr);

// ---- scoring ----------------------------------------------------------------

struct Prf {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;

  // With no positives anywhere (tp + fp + fn == 0) all three are 1.
  static Prf from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

struct SlotScores {
  std::array<Prf, 5> slots;  // indexed by Slot
  double macro_f1 = 0;
  std::size_t n = 0;

  const Prf& operator[](Slot s) const { return slots[static_cast<std::size_t>(s)]; }
  Json to_json() const;
};

// Canonical value strings of one slot ("3 Hz" for numeric frequency, the
// band canonical otherwise). Values are case-folded and mapped through the
// lexicon when given.
std::vector<std::string> slot_values(const SlotFrame& frame, Slot slot,
                                     const lexicon::Lexicon* lexicon = nullptr);
std::string format_hz(double hz);

// Micro P/R/F1 per slot over value instances; negation is binary F1 on the
// negated class. Gold ids without a prediction score as an empty frame.
// Duplicate ids on either side, or predictions for unknown ids, raise
// DataError.
SlotScores eval_slots(const std::vector<std::pair<std::string, SlotFrame>>& predictions,
                      const std::vector<GoldLabel>& gold,
                      const lexicon::Lexicon* lexicon = nullptr);

}  // namespace neurolex::ie
