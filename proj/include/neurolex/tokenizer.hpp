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

#include "neurolex/jsonl.hpp"
#include "neurolex/lexicon.hpp"

namespace neurolex::tokenizer {

inline constexpr std::size_t kSentinelCount = 100;
inline constexpr std::size_t kByteAlphabet = 256;
inline constexpr int kVocabFormatVersion = 1;

// "<extra_id_k>"
std::string sentinel(std::size_t k);
std::optional<std::size_t> parse_sentinel(std::string_view piece);

// <pad>, <unk>, </s>, <extra_id_0>..<extra_id_99>, [DATE], [ID], [NAME]
std::vector<std::string> default_specials();

struct TrainConfig {
  std::size_t vocab_size = 2048;
  bool protect_terms = false;
  std::uint64_t seed = 0;
  std::size_t min_pair_count = 1;
};

enum class PreTokenKind { kSpecial, kWhitespace, kWord, kTerm };

struct PreToken {
  PreTokenKind kind;
  std::string text;
};

// Byte-level pair-merge vocabulary. Pieces are byte strings; specials are
// atomic and never produced by merges. Whitespace runs are kept as their own
// pre-tokens so decode(encode(x)) == x for every byte string.
class SubwordVocab {
 public:
  // Trains on whitespace-pre-tokenised text. Merge order: highest pair count,
  // ties broken by the byte-wise smaller (left, right) pair. When
  // protect_terms is set, multi-word lexicon surfaces (excluding negation
  // cues) are atomic pre-tokens. Throws UsageError when vocab_size cannot
  // hold the byte alphabet plus specials, DataError on an empty corpus.
  static SubwordVocab train(const std::vector<std::string>& texts, const TrainConfig& config,
                            const lexicon::Lexicon& lexicon);

  std::vector<std::string> encode(std::string_view text) const;
  static std::string decode(const std::vector<std::string>& pieces);

  // Pieces that are not whitespace-only. Used for length limits and budgets.
  std::size_t count_tokens(std::string_view text) const;

  std::vector<PreToken> pretokenize(std::string_view text) const;

  const std::vector<std::string>& pieces() const { return pieces_; }
  const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }
  const std::vector<std::string>& specials() const { return specials_; }
  const TrainConfig& config() const { return config_; }
  const std::vector<std::string>& protected_surfaces() const { return protected_surfaces_; }
  std::size_t size() const { return pieces_.size() + specials_.size(); }

  Json to_json() const;
  static SubwordVocab from_json(const Json& j);
  // Deterministic serialisation (sorted keys, 1-space indent, trailing LF).
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;
  static SubwordVocab load(const std::filesystem::path& path);

  // A vocabulary with only the byte alphabet and default specials.
  static SubwordVocab bytes_only();
  // Builds a vocabulary from explicit merges (applied in order).
  static SubwordVocab from_merges(const std::vector<std::pair<std::string, std::string>>& merges,
                                  std::vector<std::string> protected_surfaces = {});

 private:
  void rebuild_index();
  std::vector<std::string> encode_pretoken(const std::string& word) const;

  std::vector<std::string> pieces_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::vector<std::string> specials_;
  std::vector<std::string> protected_surfaces_;
  TrainConfig config_;

  std::map<std::pair<std::string, std::string>, std::size_t> merge_rank_;
  lexicon::SurfaceMatcher protected_matcher_;
};

struct TokenizerMetrics {
  double oov_rate = 0;        // % of distinct word types not encoded as one piece
  double avg_subwords = 0;    // mean pieces per word token (AS)
  double split_ratio = 0;     // % of word tokens split into >= 2 pieces (SS)
  double multiword_ratio = 1; // pieces per word inside multi-word term occurrences (MTR)
  double multiword_ratio_per_term = 1;  // pieces per multi-word term occurrence
  std::size_t word_types = 0;
  std::size_t word_tokens = 0;
  std::size_t term_occurrences = 0;
  std::size_t term_words = 0;

  Json to_json() const;
};

// Throws DataError when the corpus has no words. With no multi-word term
// occurrences both MTR variants are reported as 1.0 with a zero count.
TokenizerMetrics eval_tokenizer(const SubwordVocab& vocab, const std::vector<std::string>& corpus,
                                const lexicon::Lexicon& lexicon);

// GPT-2 style printable mapping used for pieces in vocab files.
std::string bytes_to_printable(std::string_view bytes);
std::string printable_to_bytes(std::string_view printable);

}  // namespace neurolex::tokenizer
