#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "neurolex/error.hpp"
#include "neurolex/metrics.hpp"
#include "test_support.hpp"

using namespace neurolex;
using namespace neurolex::metrics;

namespace {

std::size_t dp_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

std::string random_words(std::mt19937_64& g, std::size_t n) {
  static const std::vector<std::string> words = {"focal", "slowing", "left", "Temporal", "spikes,", "no",
                                                 "the",   "of",      "a",    "delta.",   "Hz",      "3"};
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += words[g() % words.size()];
  }
  return s;
}

PredictionRecord nll_record(const std::string& id, std::vector<double> nlls,
                            std::optional<corpus::SectionKind> section = std::nullopt) {
  PredictionRecord r;
  r.id = id;
  r.has_nlls = true;
  for (double v : nlls) r.token_nlls.push_back({"p", v, section});
  return r;
}

PredictionRecord candidates(const std::string& id, std::vector<std::string> texts) {
  PredictionRecord r;
  r.id = id;
  r.has_candidates = true;
  double score = static_cast<double>(texts.size());
  for (auto& t : texts) r.candidates.push_back({std::move(t), score--});
  return r;
}

}  // namespace

TEST(RougeL, TrivialCases) {
  const auto same = rouge_l("Focal slowing, left.", "focal slowing left");
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  EXPECT_EQ(same.f1, 1.0);
  const auto disjoint = rouge_l("alpha beta", "gamma delta");
  EXPECT_EQ(disjoint.f1, 0.0);
  EXPECT_EQ(rouge_l("", "text").f1, 0.0);
  EXPECT_EQ(rouge_l("text", "").f1, 0.0);
}

TEST(RougeL, Tokens) {
  EXPECT_EQ(rouge_tokens("Spike-and-wave, at 3 Hz."),
            (std::vector<std::string>{"spike", "and", "wave", "at", "3", "hz"}));
}

TEST(RougeL, MatchesDynamicProgrammingOracle) {
  std::mt19937_64 g(1);
  for (int i = 0; i < 500; ++i) {
    const std::string c = random_words(g, g() % 150);
    const std::string r = random_words(g, g() % 150);
    const auto ct = rouge_tokens(c);
    const auto rt = rouge_tokens(r);
    const std::size_t lcs = dp_lcs(ct, rt);
    ASSERT_EQ(lcs_length(ct, rt), lcs);
    const auto got = rouge_l(c, r);
    if (ct.empty() || rt.empty()) {
      EXPECT_EQ(got.f1, 0.0);
      continue;
    }
    const double p = static_cast<double>(lcs) / static_cast<double>(ct.size());
    const double rc = static_cast<double>(lcs) / static_cast<double>(rt.size());
    EXPECT_EQ(got.precision, p);
    EXPECT_EQ(got.recall, rc);
    EXPECT_EQ(got.f1, lcs ? 2 * p * rc / (p + rc) : 0.0);
  }
}

TEST(RougeL, SymmetricF1) {
  std::mt19937_64 g(2);
  for (int i = 0; i < 100; ++i) {
    const std::string a = random_words(g, 1 + g() % 40);
    const std::string b = random_words(g, 1 + g() % 40);
    const auto ab = rouge_l(a, b);
    const auto ba = rouge_l(b, a);
    EXPECT_EQ(ab.precision, ba.recall);
    EXPECT_EQ(ab.recall, ba.precision);
    EXPECT_DOUBLE_EQ(ab.f1, ba.f1);
  }
}

TEST(FactF1, IdenticalIsOne) {
  const auto s = fact_f1("No focal slowing. Sharp waves over the left temporal region.",
                         "No focal slowing. Sharp waves over the left temporal region.", testkit::starter());
  EXPECT_EQ(s.f1, 1.0);
  EXPECT_EQ(s.contradictions, 0u);
}

TEST(FactF1, NegationFlipIsContradiction) {
  const auto s = fact_f1("focal slowing", "no focal slowing", testkit::starter());
  EXPECT_EQ(s.f1, 0.0);
  EXPECT_EQ(s.contradictions, 1u);
}

TEST(FactF1, OneUnsupportedFact) {
  const std::string ref =
      "Focal slowing over the left temporal region. Sharp waves over the right frontal region. "
      "Triphasic waves are seen.";
  const auto s = fact_f1(ref + " Burst suppression is present.", ref, testkit::starter());
  EXPECT_EQ(s.reference_facts, 3u);
  EXPECT_EQ(s.candidate_facts, 4u);
  EXPECT_DOUBLE_EQ(s.precision, 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(s.recall, 1.0);
  EXPECT_NEAR(s.f1, 6.0 / 7.0, 1e-12);
}

TEST(FactF1, FactFreeTextsScoreOne) {
  EXPECT_EQ(fact_f1("The patient slept.", "Nothing here.", testkit::starter()).f1, 1.0);
}

TEST(FactF1, SelfScoreOnFixture) {
  std::size_t n = 0;
  for (const auto& p : testkit::fixture_paragraphs()) {
    if (n++ == 200) break;
    const auto s = fact_f1(p.text, p.text, testkit::starter());
    EXPECT_EQ(s.f1, 1.0) << p.id();
    EXPECT_EQ(s.contradictions, 0u);
  }
}

TEST(Faithfulness, ContradictionRate) {
  const auto& lex = testkit::starter();
  EXPECT_EQ(contradiction_rate("Focal slowing. Sharp waves.", "Focal slowing. Sharp waves.", lex), 0.0);
  EXPECT_EQ(contradiction_rate("No focal slowing. No sharp waves.", "Focal slowing. Sharp waves.", lex), 1.0);
  EXPECT_EQ(contradiction_rate("The patient slept.", "Focal slowing.", lex), 0.0);
}

TEST(Faithfulness, TermIntroRate) {
  const auto& lex = testkit::starter();
  EXPECT_EQ(term_intro_rate("focal slowing", "left focal slowing", lex), 0.0);
  EXPECT_EQ(term_intro_rate("focal slowing and spikes", "focal slowing", lex), 0.5);
  EXPECT_EQ(term_intro_rate("nothing", "focal slowing", lex), 0.0);
  EXPECT_EQ(term_intro_rate("no spikes", "spikes", lex), 0.0);
}

TEST(Perplexity, UniformEqualsVocabSize) {
  const double v = 3217.0;
  std::vector<PredictionRecord> recs;
  for (int i = 0; i < 40; ++i) recs.push_back(nll_record("r" + std::to_string(i), std::vector<double>(7 + i, std::log(v))));
  EXPECT_NEAR(perplexity(recs) / v, 1.0, 1e-9);
}

TEST(Perplexity, HandComputedTwoRecords) {
  const std::vector<PredictionRecord> recs = {
      nll_record("a", {1.0, 2.0}, corpus::SectionKind::kFindings),
      nll_record("b", {0.5}, corpus::SectionKind::kImpression)};
  EXPECT_NEAR(perplexity(recs), std::exp(3.5 / 3.0), 1e-12);
  EXPECT_NEAR(perplexity(recs, corpus::SectionKind::kImpression), std::exp(0.5), 1e-12);
  EXPECT_THROW(perplexity(recs, corpus::SectionKind::kHistory), DataError);
}

TEST(Perplexity, ShardMergeEqualsBatchAndOrderInvariant) {
  std::mt19937_64 g(4);
  std::vector<PredictionRecord> recs;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> v(1 + g() % 20);
    for (auto& x : v) x = std::uniform_real_distribution<double>(0.0, 12.0)(g);
    recs.push_back(nll_record("r" + std::to_string(i), v));
  }
  const double batch = perplexity(recs);
  PerplexityAccumulator a, b;
  for (std::size_t i = 0; i < recs.size(); ++i) (i % 3 ? a : b).add(recs[i]);
  a.merge(b);
  EXPECT_NEAR(a.value(), batch, 1e-12 * batch);
  std::reverse(recs.begin(), recs.end());
  EXPECT_NEAR(perplexity(recs), batch, 1e-12 * batch);
}

TEST(Perplexity, RecordsWithoutNllsRejected) {
  PredictionRecord r;
  r.id = "x";
  r.output = "text";
  EXPECT_THROW(perplexity({r}), DataError);
}

TEST(TopK, TenSpansThreeMisses) {
  std::vector<PredictionRecord> recs;
  std::map<std::string, std::string> gold;
  for (int i = 0; i < 10; ++i) {
    const std::string id = span_record_id("ex", i);
    gold[id] = "Focal  Slowing";
    if (i < 3) {
      recs.push_back(candidates(id, {"spikes", "focal slowing"}));
    } else {
      recs.push_back(candidates(id, {"focal slowing", "spikes"}));
    }
  }
  const auto top1 = topk_accuracy(recs, gold, 1);
  EXPECT_EQ(top1.hits, 7u);
  EXPECT_NEAR(top1.accuracy, 70.0, 1e-12);
  EXPECT_NEAR(topk_accuracy(recs, gold, 5).accuracy, 100.0, 1e-12);
}

TEST(TopK, PerfectAndErrors) {
  const std::vector<PredictionRecord> recs = {candidates("a#0", {"x"}), candidates("a#1", {"y"})};
  const std::map<std::string, std::string> gold = {{"a#0", "x"}, {"a#1", "y"}};
  for (std::size_t k : {1u, 2u, 5u}) EXPECT_EQ(topk_accuracy(recs, gold, k).accuracy, 100.0);
  EXPECT_THROW(topk_accuracy(recs, gold, 0), UsageError);
  EXPECT_THROW(topk_accuracy(recs, {}, 1), DataError);
  EXPECT_EQ(topk_accuracy({}, gold, 1).accuracy, 0.0);
}

TEST(Calibration, MatchesBruteForceLoop) {
  std::mt19937_64 g(6);
  std::vector<std::pair<double, bool>> pts;
  for (int i = 0; i < 100; ++i) {
    double c = std::uniform_real_distribution<double>(0.0, 1.0)(g);
    if (i % 17 == 0) c = 1.0;
    if (i % 23 == 0) c = 0.3;
    pts.emplace_back(c, g() % 3 != 0);
  }
  for (std::size_t bins : {1u, 5u, 10u, 15u}) {
    double ece = 0, mce = 0;
    for (std::size_t b = 0; b < bins; ++b) {
      double conf = 0, acc = 0;
      std::size_t n = 0;
      for (const auto& [c, ok] : pts) {
        std::size_t idx = static_cast<std::size_t>(c * static_cast<double>(bins));
        if (idx >= bins) idx = bins - 1;
        if (idx != b) continue;
        ++n;
        conf += c;
        acc += ok;
      }
      if (n == 0) continue;
      const double gap = std::abs(acc / n - conf / n);
      ece += static_cast<double>(n) / pts.size() * gap;
      mce = std::max(mce, gap);
    }
    const auto got = calibration(pts, bins);
    EXPECT_NEAR(got.ece, ece, 1e-12) << bins;
    EXPECT_NEAR(got.mce, mce, 1e-12) << bins;
    EXPECT_LE(got.ece, got.mce + 1e-15);
  }
}

TEST(Calibration, TrivialCases) {
  const auto exact = calibration({{0.75, true}, {0.75, true}, {0.75, true}, {0.75, false}}, 10);
  EXPECT_NEAR(exact.ece, 0.0, 1e-15);
  const auto wrong = calibration({{1.0, false}}, 10);
  EXPECT_EQ(wrong.ece, 1.0);
  EXPECT_EQ(wrong.mce, 1.0);
  EXPECT_THROW(calibration({}, 10), DataError);
}

TEST(Calibration, SlotConfidencePoints) {
  ie::GoldLabel g;
  g.id = "s1";
  g.frame.pattern = {"focal slowing"};
  g.frame.negation = true;
  PredictionRecord r;
  r.id = "s1";
  r.output = R"({"pattern":["focal slowing"],"negation":false})";
  r.slot_confidences = {{"pattern", 0.9}, {"negation", 0.6}};
  auto pts = slot_confidence_points({r}, {g}, &testkit::starter());
  std::sort(pts.begin(), pts.end());
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0], std::make_pair(0.6, false));
  EXPECT_EQ(pts[1], std::make_pair(0.9, true));
}

TEST(PredictionRecord, ValidationErrors) {
  EXPECT_THROW(record_from_json(Json::parse(R"({"id":"a"})")), DataError);
  EXPECT_THROW(record_from_json(Json::parse(R"({"id":"a","candidates":[["x",1],["y",2]]})")), DataError);
  EXPECT_THROW(record_from_json(Json::parse(R"({"id":"a","token_nlls":[["x",-1]]})")), DataError);
  EXPECT_THROW(record_from_json(Json::parse(R"({"id":"a","token_nlls":[{"piece":1,"nll":1}]})")), DataError);
  EXPECT_THROW(record_from_json(Json::parse(R"({"id":"a","slot_confidences":{"pattern":1.5}})")), DataError);
  EXPECT_NO_THROW(record_from_json(Json::parse(R"({"id":"a","candidates":[["x",2],["y",2]]})")));
}

TEST(PredictionRecord, JsonRoundTrip) {
  PredictionRecord r = nll_record("a", {0.25, 1.5}, corpus::SectionKind::kImpression);
  r.output = "out";
  r.slot_confidences = {{"negation", 0.5}};
  r.has_candidates = true;
  r.candidates = {{"x", 2.0}, {"y", 1.0}};
  EXPECT_EQ(to_json(record_from_json(to_json(r))).dump(), to_json(r).dump());
}

TEST(PredictionRecord, FileErrorsNameLine) {
  testkit::TempDir dir("pred");
  write_file(dir / "p.jsonl", "{\"id\":\"a\",\"output\":\"x\"}\n{\"id\":\"b\"}\n");
  try {
    read_predictions(dir / "p.jsonl");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(MetricReport, DeterministicSerialization) {
  MetricReport a;
  a.set("b", 0.5, 2, "second");
  a.set("a", 1.0 / 3.0, 3, "first");
  MetricReport b;
  b.set("a", 1.0 / 3.0, 3, "first");
  b.set("b", 0.5, 2, "second");
  EXPECT_EQ(a.serialize(), b.serialize());
  const Json j = Json::parse(a.serialize());
  EXPECT_EQ(j.at("metrics").at("a").at("n"), 3);
}
