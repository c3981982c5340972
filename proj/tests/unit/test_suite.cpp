#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "neurolex/datagen.hpp"
#include "neurolex/error.hpp"
#include "neurolex/harness.hpp"
#include "neurolex/hash.hpp"
#include "neurolex/jsonl.hpp"
#include "neurolex/robustness.hpp"
#include "neurolex/suite.hpp"
#include "neurolex/text.hpp"
#include "test_support.hpp"

using namespace neurolex;
namespace fs = std::filesystem;

namespace {

// Writes every suite input for a 40-paragraph slice of the fixture.
suite::SuiteConfig build_pipeline(const testkit::TempDir& dir) {
  const auto& lex = testkit::starter();
  std::vector<corpus::Paragraph> paras(testkit::fixture_paragraphs().begin(),
                                       testkit::fixture_paragraphs().begin() + 40);
  std::vector<std::string> texts;
  for (const auto& p : paras) texts.push_back(p.text);
  tokenizer::TrainConfig tc;
  tc.vocab_size = 600;
  const auto vocab = tokenizer::SubwordVocab::train(texts, tc, lex);
  const harness::MockModel model(lex, vocab, texts, 5);

  suite::SuiteConfig c;
  c.out_dir = dir / "eval";
  c.vocab = dir / "vocab.json";
  vocab.save(*c.vocab);
  c.corpus = dir / "paragraphs.jsonl";
  jsonl::write_all(*c.corpus, [&] {
    std::vector<Json> v;
    for (const auto& p : paras) v.push_back(corpus::to_json(p));
    return v;
  }());

  c.scores = dir / "pred_scores.jsonl";
  c.corruption = dir / "corruption.jsonl";
  c.span_predictions = dir / "pred_spans.jsonl";
  {
    jsonl::Writer scores(*c.scores), cor(*c.corruption), spans(*c.span_predictions);
    for (const auto& p : paras) {
      scores.write(metrics::to_json(model.score_text(p.id(), p.text, p.section)));
      const auto r = datagen::corrupt_spans(p.id(), p.text, lex, vocab);
      if (r.status != datagen::CorruptionStatus::kOk) continue;
      cor.write(datagen::to_json(r.example));
      for (const auto& s : model.predict_spans(r.example)) spans.write(metrics::to_json(s));
    }
  }

  const auto gold = ie::read_gold(testkit::data_dir() / "microsuite" / "ie_gold.jsonl", &lex);
  c.ie_gold = testkit::data_dir() / "microsuite" / "ie_gold.jsonl";
  c.ie_predictions = dir / "pred_ie.jsonl";
  {
    jsonl::Writer w(*c.ie_predictions);
    for (const auto& g : gold) w.write(metrics::to_json(model.predict_frame(g.id, g.text)));
  }
  c.ratio_predictions["0.05"] = *c.ie_predictions;
  c.ratio_predictions["1.00"] = *c.ie_predictions;

  c.tasks = dir / "tasks.jsonl";
  c.task_predictions = dir / "pred_tasks.jsonl";
  {
    auto tasks = datagen::build_polish_pairs(paras, lex, 1);
    const auto sum = datagen::build_sum_pairs(paras, lex, nullptr);
    tasks.insert(tasks.end(), sum.begin(), sum.end());
    jsonl::Writer tw(*c.tasks), pw(*c.task_predictions);
    for (const auto& t : tasks) {
      tw.write(datagen::to_json(t));
      pw.write(metrics::to_json(model.predict_task(t)));
    }
  }

  const std::vector<robustness::PerturbKind> kinds(std::begin(robustness::kAllKinds), std::end(robustness::kAllKinds));
  const auto adv = robustness::build_adversarial_set(
      gold, kinds, lex, robustness::SwapTable::load(robustness::SwapTable::default_path()), 0);
  c.adversarial = dir / "adversarial.jsonl";
  c.adversarial_predictions = dir / "pred_adv.jsonl";
  {
    jsonl::Writer aw(*c.adversarial), pw(*c.adversarial_predictions);
    for (const auto& a : adv) {
      aw.write(robustness::to_json(a));
      pw.write(metrics::to_json(model.predict_frame(a.id, a.input)));
    }
  }
  return c;
}

}  // namespace

TEST(Suite, AllGroupsFinite) {
  const testkit::TempDir dir("suite_all");
  const auto c = build_pipeline(dir);
  const auto res = suite::run_suite(c);
  for (const char* group : {"tokenizer", "ppl", "topk", "ie", "calibration", "summarization", "faithfulness",
                            "negadv", "dataeff"}) {
    EXPECT_NE(std::find(res.ran.begin(), res.ran.end(), group), res.ran.end()) << group;
  }
  for (const auto& [name, v] : res.report.values) EXPECT_TRUE(std::isfinite(v.value)) << name;
  for (const auto& n : res.report.notes) EXPECT_EQ(n.find("non-finite"), std::string::npos) << n;
  // The mock frame predictor is the tagger, which agrees with the micro-suite.
  EXPECT_DOUBLE_EQ(res.report.get("ie.macro_f1"), 1.0);
  EXPECT_DOUBLE_EQ(res.report.get("negadv.f1"), 1.0);
  EXPECT_NEAR(res.report.get("ppl.all"), static_cast<double>(tokenizer::SubwordVocab::load(*c.vocab).size()), 1e-6);
  EXPECT_TRUE(res.report.has("dataeff.0.05"));
  EXPECT_TRUE(res.report.has("dataeff.1.00"));
  EXPECT_DOUBLE_EQ(res.report.get("contr_rate"), 0.0);
}

TEST(Suite, EnabledSubsetAndUnknownGroup) {
  const testkit::TempDir dir("suite_subset");
  auto c = build_pipeline(dir);
  c.enabled = {"ppl"};
  const auto res = suite::run_suite(c);
  EXPECT_EQ(res.ran, std::vector<std::string>{"ppl"});
  EXPECT_FALSE(res.report.has("ie.macro_f1"));
  c.enabled = {"ppl", "bleu"};
  EXPECT_THROW(suite::run_suite(c), UsageError);
}

TEST(Suite, MissingInputIsDataError) {
  const testkit::TempDir dir("suite_missing");
  auto c = build_pipeline(dir);
  c.scores = dir / "absent.jsonl";
  EXPECT_THROW(suite::run_suite(c), DataError);
}

TEST(Suite, InvalidPredictionLineIsNamed) {
  const testkit::TempDir dir("suite_invalid");
  auto c = build_pipeline(dir);
  {
    std::ofstream out(*c.ie_predictions, std::ios::app);
    out << R"({"id":"ms99","task":"IE","output":42})" << "\n";
  }
  const std::size_t bad_line = text::split(read_file(*c.ie_predictions), '\n').size() - 1;
  try {
    suite::run_suite(c);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("pred_ie.jsonl"), std::string::npos) << msg;
    EXPECT_NE(msg.find(":" + std::to_string(bad_line)), std::string::npos) << msg;
  }
}

TEST(Suite, WritesOutputsAndManifest) {
  const testkit::TempDir dir("suite_write");
  const auto c = build_pipeline(dir);
  const auto res = suite::run_suite_and_write(c);
  const auto metrics_json = read_file(c.out_dir / "metrics.json");
  EXPECT_EQ(metrics_json, res.report.serialize());
  EXPECT_TRUE(Json::parse(metrics_json).contains("metrics"));
  const auto tables = read_file(c.out_dir / "tables.txt");
  EXPECT_NE(tables.find("(ref)"), std::string::npos);

  const Json manifest = Json::parse(read_file(c.out_dir / "manifest.json"));
  EXPECT_EQ(manifest["outputs"]["metrics.json"], hash::sha256_hex(metrics_json));
  EXPECT_EQ(manifest["outputs"]["tables.txt"], hash::sha256_hex(tables));
  EXPECT_EQ(manifest["inputs"]["vocab"]["sha256"], hash::sha256_file(*c.vocab));
  EXPECT_EQ(manifest["inputs"]["ie_gold"]["sha256"], hash::sha256_file(*c.ie_gold));

  // A second run over the same inputs is byte-identical.
  const auto again = suite::run_suite(c);
  EXPECT_EQ(again.report.serialize(), metrics_json);
  EXPECT_EQ(again.tables, tables);
}
