#include "neurolex/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_map>

#include "neurolex/corpus.hpp"
#include "neurolex/error.hpp"
#include "neurolex/text.hpp"

namespace neurolex::tokenizer {

namespace {

bool is_whitespace_piece(std::string_view piece) {
  return std::all_of(piece.begin(), piece.end(), [](char c) { return text::is_ascii_space(c); });
}

// byte -> code point of the printable alias
const std::array<char32_t, 256>& byte_aliases() {
  static const std::array<char32_t, 256> table = [] {
    std::array<char32_t, 256> t{};
    std::array<bool, 256> direct{};
    for (int b = '!'; b <= '~'; ++b) direct[b] = true;
    for (int b = 0xA1; b <= 0xAC; ++b) direct[b] = true;
    for (int b = 0xAE; b <= 0xFF; ++b) direct[b] = true;
    char32_t next = 256;
    for (int b = 0; b < 256; ++b) t[b] = direct[b] ? static_cast<char32_t>(b) : next++;
    return t;
  }();
  return table;
}

void append_cp(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::vector<std::string> collect_protected_surfaces(const lexicon::Lexicon& lex) {
  std::set<std::string> out;
  for (const auto& e : lex.entries()) {
    if (e.category == lexicon::TermCategory::kNegationCue) continue;
    for (const auto& s : e.surfaces) {
      if (s.find(' ') != std::string::npos) out.insert(s);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> apply_merge(const std::vector<std::string>& syms, const std::string& a,
                                     const std::string& b) {
  std::vector<std::string> out;
  out.reserve(syms.size());
  for (std::size_t i = 0; i < syms.size();) {
    if (i + 1 < syms.size() && syms[i] == a && syms[i + 1] == b) {
      out.push_back(a + b);
      i += 2;
    } else {
      out.push_back(syms[i]);
      ++i;
    }
  }
  return out;
}

// Incremental pair-merge trainer over symbol ids.
class MergeTrainer {
 public:
  MergeTrainer(const std::map<std::string, std::uint64_t>& word_counts,
               const std::vector<std::string>& specials)
      : ordered_(Cmp{&pieces_}), specials_(specials.begin(), specials.end()) {
    for (int b = 0; b < 256; ++b) {
      pieces_.emplace_back(1, static_cast<char>(b));
      index_.emplace(pieces_.back(), b);
    }
    for (const auto& [word, count] : word_counts) {
      std::vector<int> syms;
      for (unsigned char c : word) syms.push_back(c);
      words_.push_back(std::move(syms));
      freq_.push_back(static_cast<std::int64_t>(count));
    }
    for (std::size_t w = 0; w < words_.size(); ++w) add_pairs(static_cast<int>(w), +1);
  }

  // Performs one merge; false when no eligible pair remains.
  bool step(std::size_t min_count, std::pair<std::string, std::string>& merge_out) {
    while (!ordered_.empty()) {
      const Cand best = *ordered_.begin();
      if (best.count < static_cast<std::int64_t>(min_count)) return false;
      const std::string merged = pieces_[best.a] + pieces_[best.b];
      if (specials_.count(merged)) {
        banned_.insert(key(best.a, best.b));
        ordered_.erase(ordered_.begin());
        continue;
      }
      int id;
      auto it = index_.find(merged);
      if (it == index_.end()) {
        id = static_cast<int>(pieces_.size());
        pieces_.push_back(merged);
        index_.emplace(merged, id);
      } else {
        id = it->second;
      }
      merge_out = {pieces_[best.a], pieces_[best.b]};
      apply(best.a, best.b, id);
      return true;
    }
    return false;
  }

  std::size_t unique_pieces() const { return pieces_.size(); }
  const std::vector<std::string>& pieces() const { return pieces_; }

 private:
  struct Cand {
    std::int64_t count;
    int a;
    int b;
  };
  struct Cmp {
    const std::vector<std::string>* pieces;
    bool operator()(const Cand& x, const Cand& y) const {
      if (x.count != y.count) return x.count > y.count;
      const int ca = (*pieces)[x.a].compare((*pieces)[y.a]);
      if (ca != 0) return ca < 0;
      const int cb = (*pieces)[x.b].compare((*pieces)[y.b]);
      if (cb != 0) return cb < 0;
      return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    }
  };

  static std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  void change(int a, int b, std::int64_t delta) {
    const std::uint64_t k = key(a, b);
    std::int64_t& count = counts_[k];
    const bool banned = banned_.count(k) > 0;
    if (count > 0 && !banned) ordered_.erase(Cand{count, a, b});
    count += delta;
    if (count > 0 && !banned) ordered_.insert(Cand{count, a, b});
  }

  void add_pairs(int w, int sign) {
    const auto& syms = words_[w];
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      change(syms[i], syms[i + 1], sign * freq_[w]);
      if (sign > 0) occurrences_[key(syms[i], syms[i + 1])].push_back(w);
    }
  }

  void apply(int a, int b, int id) {
    std::vector<int> candidates = std::move(occurrences_[key(a, b)]);
    occurrences_.erase(key(a, b));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (int w : candidates) {
      auto& syms = words_[w];
      bool present = false;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i] == a && syms[i + 1] == b) {
          present = true;
          break;
        }
      }
      if (!present) continue;
      add_pairs(w, -1);
      std::vector<int> merged;
      merged.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == a && syms[i + 1] == b) {
          merged.push_back(id);
          i += 2;
        } else {
          merged.push_back(syms[i]);
          ++i;
        }
      }
      syms = std::move(merged);
      add_pairs(w, +1);
    }
  }

  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> words_;
  std::vector<std::int64_t> freq_;
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<int>> occurrences_;
  std::set<Cand, Cmp> ordered_;
  std::set<std::uint64_t> banned_;
  std::set<std::string> specials_;
};

}  // namespace

std::string sentinel(std::size_t k) { return "<extra_id_" + std::to_string(k) + ">"; }

std::optional<std::size_t> parse_sentinel(std::string_view piece) {
  constexpr std::string_view kPrefix = "<extra_id_";
  if (piece.size() <= kPrefix.size() + 1 || piece.substr(0, kPrefix.size()) != kPrefix ||
      piece.back() != '>') {
    return std::nullopt;
  }
  const std::string_view digits = piece.substr(kPrefix.size(), piece.size() - kPrefix.size() - 1);
  if (digits.empty() || digits.size() > 3) return std::nullopt;
  if (digits.size() > 1 && digits[0] == '0') return std::nullopt;
  std::size_t k = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    k = k * 10 + static_cast<std::size_t>(c - '0');
  }
  if (k >= kSentinelCount) return std::nullopt;
  return k;
}

std::vector<std::string> default_specials() {
  std::vector<std::string> out = {"<pad>", "<unk>", "</s>"};
  for (std::size_t k = 0; k < kSentinelCount; ++k) out.push_back(sentinel(k));
  out.emplace_back(corpus::kDatePlaceholder);
  out.emplace_back(corpus::kIdPlaceholder);
  out.emplace_back(corpus::kNamePlaceholder);
  return out;
}

std::string bytes_to_printable(std::string_view bytes) {
  std::string out;
  for (unsigned char c : bytes) append_cp(out, byte_aliases()[c]);
  return out;
}

std::string printable_to_bytes(std::string_view printable) {
  static const std::unordered_map<char32_t, unsigned char> inverse = [] {
    std::unordered_map<char32_t, unsigned char> m;
    for (int b = 0; b < 256; ++b) m.emplace(byte_aliases()[b], static_cast<unsigned char>(b));
    return m;
  }();
  std::string out;
  std::size_t i = 0;
  while (i < printable.size()) {
    const auto b0 = static_cast<unsigned char>(printable[i]);
    char32_t cp;
    std::size_t len;
    if (b0 < 0x80) {
      cp = b0, len = 1;
    } else if (b0 < 0xE0) {
      len = 2;
      if (i + 1 >= printable.size()) throw DataError("truncated piece string");
      cp = ((b0 & 0x1F) << 6) | (static_cast<unsigned char>(printable[i + 1]) & 0x3F);
    } else {
      len = 3;
      if (i + 2 >= printable.size()) throw DataError("truncated piece string");
      cp = ((b0 & 0x0F) << 12) | ((static_cast<unsigned char>(printable[i + 1]) & 0x3F) << 6) |
           (static_cast<unsigned char>(printable[i + 2]) & 0x3F);
    }
    auto it = inverse.find(cp);
    if (it == inverse.end()) throw DataError("piece string contains an unmapped character");
    out.push_back(static_cast<char>(it->second));
    i += len;
  }
  return out;
}

void SubwordVocab::rebuild_index() {
  merge_rank_.clear();
  for (std::size_t r = 0; r < merges_.size(); ++r) merge_rank_.emplace(merges_[r], r);
  protected_matcher_ = lexicon::SurfaceMatcher();
  for (std::size_t i = 0; i < protected_surfaces_.size(); ++i) {
    protected_matcher_.add(protected_surfaces_[i], i);
  }
}

std::vector<PreToken> SubwordVocab::pretokenize(std::string_view input) const {
  std::vector<PreToken> out;
  const auto split_runs = [&](std::string_view seg) {
    std::size_t i = 0;
    while (i < seg.size()) {
      const bool ws = text::is_ascii_space(seg[i]);
      std::size_t j = i;
      while (j < seg.size() && text::is_ascii_space(seg[j]) == ws) ++j;
      out.push_back({ws ? PreTokenKind::kWhitespace : PreTokenKind::kWord,
                     std::string(seg.substr(i, j - i))});
      i = j;
    }
  };
  const auto flush = [&](std::string_view seg) {
    if (seg.empty()) return;
    if (protected_matcher_.empty()) {
      split_runs(seg);
      return;
    }
    std::size_t last = 0;
    for (const auto& hit : protected_matcher_.find_all(seg)) {
      split_runs(seg.substr(last, hit.offset - last));
      out.push_back({PreTokenKind::kTerm, std::string(seg.substr(hit.offset, hit.length))});
      last = hit.offset + hit.length;
    }
    split_runs(seg.substr(last));
  };

  std::size_t seg_start = 0;
  std::size_t i = 0;
  while (i < input.size()) {
    if (input[i] == '<' || input[i] == '[') {
      std::size_t matched = 0;
      for (const std::string& s : specials_) {
        if (s.size() > matched && input.substr(i, s.size()) == s) matched = s.size();
      }
      if (matched) {
        flush(input.substr(seg_start, i - seg_start));
        out.push_back({PreTokenKind::kSpecial, std::string(input.substr(i, matched))});
        i += matched;
        seg_start = i;
        continue;
      }
    }
    ++i;
  }
  flush(input.substr(seg_start));
  return out;
}

std::vector<std::string> SubwordVocab::encode_pretoken(const std::string& word) const {
  std::vector<std::string> syms;
  syms.reserve(word.size());
  for (char c : word) syms.emplace_back(1, c);
  while (syms.size() > 1) {
    std::size_t best_rank = SIZE_MAX;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      auto it = merge_rank_.find({syms[i], syms[i + 1]});
      if (it != merge_rank_.end() && it->second < best_rank) {
        best_rank = it->second;
        best_i = i;
      }
    }
    if (best_rank == SIZE_MAX) break;
    const std::string a = syms[best_i];
    const std::string b = syms[best_i + 1];
    syms = apply_merge(syms, a, b);
  }
  return syms;
}

std::vector<std::string> SubwordVocab::encode(std::string_view text) const {
  std::vector<std::string> out;
  for (PreToken& pt : pretokenize(text)) {
    if (pt.kind == PreTokenKind::kSpecial) {
      out.push_back(std::move(pt.text));
      continue;
    }
    for (auto& piece : encode_pretoken(pt.text)) out.push_back(std::move(piece));
  }
  return out;
}

std::string SubwordVocab::decode(const std::vector<std::string>& pieces) {
  std::string out;
  for (const auto& p : pieces) out.append(p);
  return out;
}

std::size_t SubwordVocab::count_tokens(std::string_view text) const {
  std::size_t n = 0;
  for (const auto& p : encode(text)) {
    if (!is_whitespace_piece(p)) ++n;
  }
  return n;
}

SubwordVocab SubwordVocab::bytes_only() { return from_merges({}); }

SubwordVocab SubwordVocab::from_merges(const std::vector<std::pair<std::string, std::string>>& merges,
                                       std::vector<std::string> protected_surfaces) {
  SubwordVocab v;
  v.specials_ = default_specials();
  std::set<std::string> seen;
  for (int b = 0; b < 256; ++b) {
    v.pieces_.emplace_back(1, static_cast<char>(b));
    seen.insert(v.pieces_.back());
  }
  for (const auto& [a, b] : merges) {
    if (seen.insert(a + b).second) v.pieces_.push_back(a + b);
  }
  v.merges_ = merges;
  v.protected_surfaces_ = std::move(protected_surfaces);
  v.config_.vocab_size = v.size();
  v.config_.protect_terms = !v.protected_surfaces_.empty();
  v.rebuild_index();
  return v;
}

SubwordVocab SubwordVocab::train(const std::vector<std::string>& texts, const TrainConfig& config,
                                 const lexicon::Lexicon& lexicon) {
  SubwordVocab v;
  v.config_ = config;
  v.specials_ = default_specials();
  if (config.vocab_size < kByteAlphabet + v.specials_.size()) {
    throw UsageError("vocab_size " + std::to_string(config.vocab_size) +
                     " is smaller than the byte alphabet plus specials (" +
                     std::to_string(kByteAlphabet + v.specials_.size()) + ")");
  }
  if (config.protect_terms) v.protected_surfaces_ = collect_protected_surfaces(lexicon);
  v.rebuild_index();

  std::map<std::string, std::uint64_t> counts;
  for (const auto& t : texts) {
    for (auto& pt : v.pretokenize(t)) {
      if (pt.kind == PreTokenKind::kWord || pt.kind == PreTokenKind::kTerm) ++counts[pt.text];
    }
  }
  if (counts.empty()) throw DataError("tokenizer training corpus contains no words");

  MergeTrainer trainer(counts, v.specials_);
  std::pair<std::string, std::string> merge;
  while (trainer.unique_pieces() + v.specials_.size() < config.vocab_size &&
         trainer.step(config.min_pair_count, merge)) {
    v.merges_.push_back(merge);
  }
  v.pieces_ = trainer.pieces();
  v.rebuild_index();
  return v;
}

Json SubwordVocab::to_json() const {
  Json pieces = Json::array();
  for (const auto& p : pieces_) pieces.push_back(bytes_to_printable(p));
  Json merges = Json::array();
  for (const auto& [a, b] : merges_) {
    merges.push_back(Json::array({bytes_to_printable(a), bytes_to_printable(b)}));
  }
  return {{"version", kVocabFormatVersion},
          {"pieces", pieces},
          {"merges", merges},
          {"specials", specials_},
          {"config",
           {{"vocab_size", config_.vocab_size},
            {"protect_terms", config_.protect_terms},
            {"seed", config_.seed},
            {"min_pair_count", config_.min_pair_count},
            {"protected_surfaces", protected_surfaces_}}}};
}

SubwordVocab SubwordVocab::from_json(const Json& j) {
  SubwordVocab v;
  try {
    if (j.at("version").get<int>() != kVocabFormatVersion) {
      throw DataError("unsupported vocab version " + j.at("version").dump());
    }
    for (const auto& p : j.at("pieces")) v.pieces_.push_back(printable_to_bytes(p.get<std::string>()));
    for (const auto& m : j.at("merges")) {
      v.merges_.emplace_back(printable_to_bytes(m.at(0).get<std::string>()),
                             printable_to_bytes(m.at(1).get<std::string>()));
    }
    v.specials_ = j.at("specials").get<std::vector<std::string>>();
    const Json& c = j.at("config");
    v.config_.vocab_size = c.at("vocab_size").get<std::size_t>();
    v.config_.protect_terms = c.at("protect_terms").get<bool>();
    v.config_.seed = c.at("seed").get<std::uint64_t>();
    v.config_.min_pair_count = c.value("min_pair_count", std::size_t{1});
    v.protected_surfaces_ = c.value("protected_surfaces", std::vector<std::string>{});
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed vocab file: ") + e.what());
  }
  std::set<std::string> pieces(v.pieces_.begin(), v.pieces_.end());
  if (pieces.size() != v.pieces_.size()) throw DataError("vocab pieces are not unique");
  for (const auto& [a, b] : v.merges_) {
    if (!pieces.count(a + b)) throw DataError("merge output missing from pieces");
  }
  for (const auto& s : default_specials()) {
    if (std::find(v.specials_.begin(), v.specials_.end(), s) == v.specials_.end()) {
      throw DataError("vocab is missing special " + s);
    }
  }
  v.rebuild_index();
  return v;
}

std::string SubwordVocab::serialize() const { return to_json().dump(1) + "\n"; }

void SubwordVocab::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

SubwordVocab SubwordVocab::load(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

Json TokenizerMetrics::to_json() const {
  return {{"oov_rate", oov_rate},
          {"avg_subwords", avg_subwords},
          {"split_ratio", split_ratio},
          {"multiword_ratio", multiword_ratio},
          {"multiword_ratio_per_term", multiword_ratio_per_term},
          {"word_types", word_types},
          {"word_tokens", word_tokens},
          {"term_occurrences", term_occurrences},
          {"term_words", term_words}};
}

TokenizerMetrics eval_tokenizer(const SubwordVocab& vocab, const std::vector<std::string>& corpus,
                                const lexicon::Lexicon& lexicon) {
  TokenizerMetrics m;
  std::map<std::string, std::size_t> type_pieces;
  std::size_t total_pieces = 0, split_tokens = 0;
  std::size_t term_pieces = 0;
  for (const std::string& t : corpus) {
    for (const std::string& word : text::split_whitespace(t)) {
      auto it = type_pieces.find(word);
      if (it == type_pieces.end()) it = type_pieces.emplace(word, vocab.count_tokens(word)).first;
      ++m.word_tokens;
      total_pieces += it->second;
      if (it->second >= 2) ++split_tokens;
    }
    for (const auto& match : lexicon::find_terms(t, lexicon)) {
      const std::string_view span = std::string_view(t).substr(match.offset, match.length);
      const std::size_t words = text::split_whitespace(span).size();
      if (words < 2) continue;
      ++m.term_occurrences;
      m.term_words += words;
      term_pieces += vocab.count_tokens(span);
    }
  }
  if (m.word_tokens == 0) throw DataError("tokenizer evaluation corpus contains no words");
  m.word_types = type_pieces.size();
  std::size_t oov = 0;
  for (const auto& [w, n] : type_pieces) {
    if (n != 1) ++oov;
  }
  m.oov_rate = 100.0 * static_cast<double>(oov) / static_cast<double>(m.word_types);
  m.avg_subwords = static_cast<double>(total_pieces) / static_cast<double>(m.word_tokens);
  m.split_ratio = 100.0 * static_cast<double>(split_tokens) / static_cast<double>(m.word_tokens);
  if (m.term_occurrences > 0) {
    m.multiword_ratio = static_cast<double>(term_pieces) / static_cast<double>(m.term_words);
    m.multiword_ratio_per_term =
        static_cast<double>(term_pieces) / static_cast<double>(m.term_occurrences);
  }
  return m;
}

}  // namespace neurolex::tokenizer
