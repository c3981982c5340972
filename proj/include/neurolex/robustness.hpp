#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "neurolex/ie.hpp"
#include "neurolex/jsonl.hpp"
#include "neurolex/lexicon.hpp"

namespace neurolex::robustness {

enum class PerturbKind { kCueSwap, kScopeShift, kDoubleNeg };
enum class LabelTransform { kPreserve, kFlip };

inline constexpr PerturbKind kAllKinds[] = {PerturbKind::kCueSwap, PerturbKind::kScopeShift,
                                            PerturbKind::kDoubleNeg};

std::string_view to_string(PerturbKind k);  // CUE_SWAP, SCOPE_SHIFT, DOUBLE_NEG
std::string_view to_string(LabelTransform t);  // PRESERVE, FLIP
PerturbKind parse_kind(std::string_view s);
LabelTransform label_transform(PerturbKind k);

// Cue replacement table. Each line: from <TAB> to [<TAB> "both"].
class SwapTable {
 public:
  static SwapTable parse(std::string_view content, const std::string& origin = "<memory>");
  static SwapTable load(const std::filesystem::path& path);
  static std::filesystem::path default_path();
  // Built-in table: no<->without, absence of<->lack of, not->no evidence of.
  static SwapTable defaults();

  std::vector<std::string> replacements(std::string_view cue) const;
  void add(std::string from, std::string to);

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

struct Perturbation {
  PerturbKind kind = PerturbKind::kCueSwap;
  std::string original;
  std::string perturbed;
  LabelTransform transform = LabelTransform::kPreserve;
  std::string applied_cue;
};

struct PerturbResult {
  Perturbation perturbation;
  ie::SlotFrame gold;  // transformed
};

// Only "effective" cues are perturbed: the sole cue of its clause with a
// pattern after it in that clause.
//   CUE_SWAP    replaces the cue through the swap table.
//   SCOPE_SHIFT rewrites "<cue> M* P [is seen]" as "<cue'> evidence that
//               M* P can be seen", embedding the pattern in a clause the cue
//               still scopes over. Cues: no, without, absence of, lack of,
//               no evidence of, negative for.
//   DOUBLE_NEG  replaces the cue with "not without"; requires it to be the
//               only negated clause. Gold negation flips.
// Returns nullopt when the sentence offers no applicable site.
std::optional<PerturbResult> perturb(std::string_view sentence, const ie::SlotFrame& gold,
                                     PerturbKind kind, const lexicon::Lexicon& lexicon,
                                     const SwapTable& swaps, std::uint64_t seed);

struct AdversarialExample {
  std::string id;
  PerturbKind kind = PerturbKind::kCueSwap;
  std::string original_id;
  std::string original;
  std::string input;
  ie::SlotFrame gold;
  LabelTransform transform = LabelTransform::kPreserve;
  std::string applied_cue;
};

// One example per applicable (sentence, kind); ids are original_id:KIND.
std::vector<AdversarialExample> build_adversarial_set(const std::vector<ie::GoldLabel>& sentences,
                                                      const std::vector<PerturbKind>& kinds,
                                                      const lexicon::Lexicon& lexicon,
                                                      const SwapTable& swaps, std::uint64_t seed);

OrderedJson to_json(const AdversarialExample& e);
AdversarialExample adversarial_from_json(const Json& j, const lexicon::Lexicon* lexicon = nullptr);
std::vector<AdversarialExample> read_adversarial(const std::filesystem::path& path,
                                                 const lexicon::Lexicon* lexicon = nullptr);

// Binary F1 on the negation slot (positive = negated). Missing predictions
// count as not negated; duplicate or unknown ids raise DataError.
ie::Prf eval_negadv(const std::vector<std::pair<std::string, bool>>& predictions,
                    const std::vector<AdversarialExample>& adversarial);

}  // namespace neurolex::robustness
