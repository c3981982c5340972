#include <gtest/gtest.h>

#include <random>

#include "neurolex/error.hpp"
#include "neurolex/text.hpp"
#include "neurolex/tokenizer.hpp"
#include "test_support.hpp"

using namespace neurolex;
using namespace neurolex::tokenizer;

namespace {

std::vector<std::string> fixture_texts(std::size_t n) {
  std::vector<std::string> out;
  for (const auto& p : testkit::fixture_paragraphs()) {
    if (out.size() == n) break;
    out.push_back(p.text);
  }
  return out;
}

SubwordVocab toy_vocab() {
  return SubwordVocab::from_merges({{"n", "o"},     {"s", "l"},     {"sl", "o"},    {"slo", "w"},
                                    {"i", "n"},     {"in", "g"},    {"slow", "ing"}, {"f", "o"},
                                    {"fo", "c"},    {"foc", "a"},   {"foca", "l"},  {"s", "p"},
                                    {"sp", "i"},    {"spi", "k"},   {"spik", "e"},  {"spike", "s"}});
}

}  // namespace

TEST(Encode, RoundTripsArbitraryBytes) {
  const SubwordVocab v = toy_vocab();
  std::mt19937_64 g(3);
  for (int n = 0; n < 2000; ++n) {
    std::string s(g() % 64, '\0');
    for (auto& c : s) c = static_cast<char>(g() & 0xFF);
    EXPECT_EQ(SubwordVocab::decode(v.encode(s)), s);
  }
}

TEST(Encode, SpecialsAreAtomic) {
  const SubwordVocab v = toy_vocab();
  const auto pieces = v.encode("no<extra_id_3>[DATE] x");
  ASSERT_GE(pieces.size(), 3u);
  EXPECT_EQ(pieces[0], "no");
  EXPECT_EQ(pieces[1], "<extra_id_3>");
  EXPECT_EQ(pieces[2], "[DATE]");
  EXPECT_EQ(sentinel(7), "<extra_id_7>");
  EXPECT_EQ(parse_sentinel("<extra_id_42>"), 42u);
  EXPECT_FALSE(parse_sentinel("<extra_id_x>").has_value());
}

// Pieces for each word traced by hand through the toy merge list.
TEST(EvalTokenizer, HandTokenizedFixture) {
  const SubwordVocab v = toy_vocab();
  const std::vector<std::pair<std::string, std::vector<std::string>>> table = {
      {"no", {"no"}},
      {"No", {"N", "o"}},
      {"focal", {"focal"}},
      {"focally", {"focal", "l", "y"}},
      {"slowing", {"slowing"}},
      {"slowing.", {"slowing", "."}},
      {"slow", {"slow"}},
      {"spikes", {"spikes"}},
      {"spike", {"spike"}},
      {"left", {"l", "e", "f", "t"}},
      {"is", {"i", "s"}},
      {"seen", {"s", "e", "e", "n"}},
      {"sing", {"s", "ing"}},
  };
  std::map<std::string, std::size_t> pieces_of;
  for (const auto& [word, pieces] : table) {
    EXPECT_EQ(v.encode(word), pieces) << word;
    pieces_of[word] = pieces.size();
  }
  const std::vector<std::string> corpus = {
      "no focal slowing",  "left focal slowing.", "No spikes", "spikes is seen",       "slow spike",
      "focally slow",      "sing",                "no spikes", "left spike is seen", "focal slowing is seen"};
  const lexicon::Lexicon lex({{"focal slowing", {}, lexicon::TermCategory::kPattern, {}},
                              {"left spike", {}, lexicon::TermCategory::kPattern, {}},
                              {"left", {}, lexicon::TermCategory::kLaterality, {}},
                              {"no", {}, lexicon::TermCategory::kNegationCue, {}}});

  // Hand oracle: 26 word tokens, 49 pieces, 12 split tokens, 13 types of
  // which 7 are not single pieces. Multi-word terms: "focal slowing" x3
  // (2 pieces, 2 words each) and "left spike" x1 (5 pieces, 2 words).
  std::size_t tokens = 0, pieces = 0, split = 0;
  std::set<std::string> types;
  for (const auto& s : corpus) {
    for (const auto& w : text::split_whitespace(s)) {
      ++tokens;
      pieces += pieces_of.at(w);
      split += pieces_of.at(w) >= 2;
      types.insert(w);
    }
  }
  std::size_t oov_types = 0;
  for (const auto& t : types) oov_types += pieces_of.at(t) != 1;
  ASSERT_EQ(tokens, 26u);
  ASSERT_EQ(pieces, 49u);
  ASSERT_EQ(split, 12u);
  ASSERT_EQ(types.size(), 13u);
  ASSERT_EQ(oov_types, 7u);

  const TokenizerMetrics m = eval_tokenizer(v, corpus, lex);
  EXPECT_NEAR(m.oov_rate, 700.0 / 13.0, 1e-9);
  EXPECT_NEAR(m.avg_subwords, 49.0 / 26.0, 1e-9);
  EXPECT_NEAR(m.split_ratio, 1200.0 / 26.0, 1e-9);
  EXPECT_NEAR(m.multiword_ratio, 11.0 / 8.0, 1e-9);
  EXPECT_NEAR(m.multiword_ratio_per_term, 11.0 / 4.0, 1e-9);
  EXPECT_EQ(m.term_occurrences, 4u);
}

TEST(EvalTokenizer, SaturatedVocab) {
  const std::vector<std::string> corpus = {"alpha beta", "beta alpha alpha"};
  const lexicon::Lexicon lex({{"alpha beta", {}, lexicon::TermCategory::kPattern, {}}});
  TrainConfig cfg;
  cfg.vocab_size = 4096;
  const SubwordVocab v = SubwordVocab::train(corpus, cfg, lex);
  EXPECT_EQ(v.encode("alpha").size(), 1u);
  EXPECT_EQ(v.encode("beta").size(), 1u);
  const TokenizerMetrics m = eval_tokenizer(v, corpus, lex);
  EXPECT_EQ(m.oov_rate, 0.0);
  EXPECT_EQ(m.avg_subwords, 1.0);
  EXPECT_EQ(m.split_ratio, 0.0);
  EXPECT_EQ(m.multiword_ratio, 1.0);
}

TEST(EvalTokenizer, EmptyCorpusIsAnError) {
  EXPECT_THROW(eval_tokenizer(toy_vocab(), {"", "   "}, lexicon::Lexicon{}), DataError);
}

// Pair counts over {low, lower, lowest}: (l,o)=3 and (o,w)=3 tie and the
// smaller pair wins; then lo+w, low+e, and the singleton ties resolve
// byte-wise: lowe+r, lowe+s, lowes+t.
TEST(Train, MergeOrderOnToyCorpus) {
  TrainConfig cfg;
  cfg.vocab_size = 4096;
  const SubwordVocab v = SubwordVocab::train({"low lower lowest"}, cfg, lexicon::Lexicon{});
  const std::vector<std::pair<std::string, std::string>> want = {
      {"l", "o"}, {"lo", "w"}, {"low", "e"}, {"lowe", "r"}, {"lowe", "s"}, {"lowes", "t"}};
  EXPECT_EQ(v.merges(), want);
}

TEST(Train, RejectsTinyVocabAndEmptyCorpus) {
  TrainConfig cfg;
  cfg.vocab_size = 100;
  EXPECT_THROW(SubwordVocab::train({"abc"}, cfg, lexicon::Lexicon{}), UsageError);
  cfg.vocab_size = 2048;
  EXPECT_THROW(SubwordVocab::train({}, cfg, lexicon::Lexicon{}), DataError);
}

TEST(Train, SpecialsNeverProducedByMerges) {
  TrainConfig cfg;
  cfg.vocab_size = 1024;
  const SubwordVocab v = SubwordVocab::train(fixture_texts(50), cfg, testkit::starter());
  std::set<std::string> pieces(v.pieces().begin(), v.pieces().end());
  for (const auto& s : v.specials()) EXPECT_EQ(pieces.count(s), 0u) << s;
  for (const auto& [a, b] : v.merges()) EXPECT_EQ(pieces.count(a + b), 1u);
}

TEST(Train, Deterministic) {
  TrainConfig cfg;
  cfg.vocab_size = 1024;
  cfg.seed = 7;
  const auto texts = fixture_texts(200);
  EXPECT_EQ(SubwordVocab::train(texts, cfg, testkit::starter()).serialize(),
            SubwordVocab::train(texts, cfg, testkit::starter()).serialize());
}

TEST(Train, MonotoneSaturation) {
  const auto texts = fixture_texts(200);
  TokenizerMetrics prev;
  bool first = true;
  for (std::size_t size : {400u, 600u, 900u, 1400u, 2200u}) {
    TrainConfig cfg;
    cfg.vocab_size = size;
    const auto m = eval_tokenizer(SubwordVocab::train(texts, cfg, testkit::starter()), texts, testkit::starter());
    if (!first) {
      EXPECT_LE(m.oov_rate, prev.oov_rate) << size;
      EXPECT_LE(m.avg_subwords, prev.avg_subwords) << size;
      EXPECT_LE(m.split_ratio, prev.split_ratio) << size;
    }
    prev = m;
    first = false;
  }
}

TEST(Train, ProtectedTermsLowerMtr) {
  const auto texts = fixture_texts(300);
  TrainConfig cfg;
  cfg.vocab_size = 1500;
  const auto plain = eval_tokenizer(SubwordVocab::train(texts, cfg, testkit::starter()), texts, testkit::starter());
  cfg.protect_terms = true;
  const auto prot = eval_tokenizer(SubwordVocab::train(texts, cfg, testkit::starter()), texts, testkit::starter());
  EXPECT_LT(prot.multiword_ratio, plain.multiword_ratio);
}

TEST(VocabFile, JsonRoundTrip) {
  TrainConfig cfg;
  cfg.vocab_size = 700;
  cfg.protect_terms = true;
  const SubwordVocab v = SubwordVocab::train(fixture_texts(50), cfg, testkit::starter());
  testkit::TempDir dir("vocab");
  v.save(dir / "vocab.json");
  const SubwordVocab back = SubwordVocab::load(dir / "vocab.json");
  EXPECT_EQ(back.serialize(), v.serialize());
  const std::string probe = "There is focal slowing over the left temporal region.";
  EXPECT_EQ(back.encode(probe), v.encode(probe));
}

TEST(VocabFile, PrintableMappingRoundTrips) {
  std::string all;
  for (int b = 0; b < 256; ++b) all.push_back(static_cast<char>(b));
  EXPECT_EQ(printable_to_bytes(bytes_to_printable(all)), all);
}
