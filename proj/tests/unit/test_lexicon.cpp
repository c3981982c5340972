#include <gtest/gtest.h>

#include <random>

#include "neurolex/error.hpp"
#include "neurolex/lexicon.hpp"
#include "neurolex/text.hpp"
#include "test_support.hpp"

using namespace neurolex;
using namespace neurolex::lexicon;

namespace {

struct Window {
  std::size_t offset;
  std::size_t length;
};

// Tries every surface at every position; keeps the longest at the earliest
// start, then resumes after it.
std::vector<Window> brute_force_matches(std::string_view text, const Lexicon& lex) {
  const std::string lower = text::to_lower(text);
  std::vector<std::string> surfaces;
  for (const auto& e : lex.entries()) {
    for (const auto& s : e.surfaces) surfaces.push_back(s);
  }
  std::vector<Window> out;
  std::size_t i = 0;
  while (i < lower.size()) {
    const bool left_ok = i == 0 || !text::is_word_byte(static_cast<unsigned char>(lower[i - 1]));
    std::size_t best = 0;
    if (left_ok) {
      for (const auto& s : surfaces) {
        if (s.size() <= best || lower.compare(i, s.size(), s) != 0) continue;
        const std::size_t end = i + s.size();
        if (end < lower.size() && text::is_word_byte(static_cast<unsigned char>(lower[end]))) continue;
        best = s.size();
      }
    }
    if (best > 0) {
      out.push_back({i, best});
      i += best;
    } else {
      ++i;
    }
  }
  return out;
}

std::string random_sentence(std::mt19937_64& g, const Lexicon& lex) {
  static const std::vector<std::string> filler = {"the", "is", "seen", "over", "with", "and", "of", "a",
                                                  "spiked", "leftward", "x", "3", "Hz", "wave", "-", ","};
  std::string s;
  const std::size_t words = 3 + g() % 25;
  for (std::size_t w = 0; w < words && s.size() < 450; ++w) {
    if (!s.empty()) s += (g() % 7 == 0) ? ", " : " ";
    std::string piece;
    if (g() % 2) {
      const auto& e = lex.entry(g() % lex.size());
      piece = e.surfaces[g() % e.surfaces.size()];
    } else {
      piece = filler[g() % filler.size()];
    }
    if (g() % 3 == 0) piece = text::to_upper(piece);
    s += piece;
  }
  return s.substr(0, 500);
}

}  // namespace

TEST(LoadLexicon, StarterHasAllCategories) {
  const Lexicon& lex = testkit::starter();
  EXPECT_GE(lex.size(), 150u);
  const auto report = validate_lexicon(lex);
  EXPECT_TRUE(report.duplicates.empty());
  EXPECT_TRUE(report.empty_categories.empty());
}

TEST(LoadLexicon, RejectsDuplicateSurfaceNamingBoth) {
  const std::string content =
      "{\"canonical\":\"spikes\",\"surfaces\":[\"spike\"],\"category\":\"PATTERN\"}\n"
      "{\"canonical\":\"spike train\",\"surfaces\":[\"spike\"],\"category\":\"PATTERN\"}\n";
  try {
    parse_lexicon(content, false);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("spikes"), std::string::npos);
    EXPECT_NE(msg.find("spike train"), std::string::npos);
  }
}

TEST(LoadLexicon, RejectsUnknownCategory) {
  EXPECT_THROW(parse_lexicon("{\"canonical\":\"x\",\"surfaces\":[\"x\"],\"category\":\"COLOR\"}\n", false),
               DataError);
}

TEST(LoadLexicon, ReadsTsv) {
  const Lexicon lex = parse_lexicon("FIRDA\tfrontal intermittent rhythmic delta activity\tPATTERN\tA pattern.\n"
                                    "left\tleft-sided\tLATERALITY\t\n",
                                    true);
  ASSERT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.canonicalize("Left-Sided"), "left");
  EXPECT_EQ(lex.entry(0).definition, "A pattern.");
  EXPECT_FALSE(lex.entry(1).definition.has_value());
}

TEST(ValidateLexicon, SharedSurfaceIsOneFinding) {
  Lexicon lex({{"spikes", {"spike"}, TermCategory::kPattern, {}},
               {"spike train", {"spike"}, TermCategory::kPattern, {}}});
  EXPECT_EQ(validate_lexicon(lex).duplicates.size(), 1u);
}

TEST(ValidateLexicon, EmptyLexiconHasFiveEmptyCategories) {
  EXPECT_EQ(validate_lexicon(Lexicon{}).empty_categories.size(), 5u);
}

TEST(FindTerms, AttenuationOfAlphaRhythm) {
  const Lexicon& lex = testkit::starter();
  const auto m = find_terms("attenuation of alpha rhythm", lex);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(lex.entry(m[0].entry).canonical, "attenuation");
  EXPECT_EQ(lex.entry(m[1].entry).canonical, "alpha rhythm");
  EXPECT_EQ(lex.entry(m[1].entry).category, TermCategory::kPattern);
}

TEST(FindTerms, EmptyText) { EXPECT_TRUE(find_terms("", testkit::starter()).empty()); }

TEST(FindTerms, LongestMatchWins) {
  const Lexicon& lex = testkit::starter();
  const auto m = find_terms("Brief spike-and-wave discharges and a spike.", lex);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].matched_surface, "spike-and-wave discharges");
  EXPECT_EQ(m[1].matched_surface, "spike");
}

TEST(FindTerms, WordBoundaryAnchored) {
  const Lexicon& lex = testkit::starter();
  EXPECT_TRUE(find_terms("spiked leftward", lex).empty());
}

TEST(FindTerms, AgreesWithBruteForce) {
  const Lexicon& lex = testkit::starter();
  std::mt19937_64 g(5);
  for (int n = 0; n < 200; ++n) {
    const std::string s = random_sentence(g, lex);
    const auto got = find_terms(s, lex);
    const auto want = brute_force_matches(s, lex);
    ASSERT_EQ(got.size(), want.size()) << s;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].offset, want[i].offset) << s;
      EXPECT_EQ(got[i].length, want[i].length) << s;
    }
  }
}

TEST(FindTerms, NonOverlappingAndCaseInsensitive) {
  const Lexicon& lex = testkit::starter();
  std::mt19937_64 g(9);
  for (int n = 0; n < 200; ++n) {
    const std::string s = random_sentence(g, lex);
    const auto m = find_terms(s, lex);
    for (std::size_t i = 1; i < m.size(); ++i) EXPECT_LE(m[i - 1].end(), m[i].offset);
    const auto upper = find_terms(text::to_upper(s), lex);
    ASSERT_EQ(upper.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_EQ(upper[i].offset, m[i].offset);
      EXPECT_EQ(upper[i].length, m[i].length);
    }
  }
}
