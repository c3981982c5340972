#include "neurolex/suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "neurolex/corpus.hpp"
#include "neurolex/datagen.hpp"
#include "neurolex/error.hpp"
#include "neurolex/hash.hpp"
#include "neurolex/ie.hpp"
#include "neurolex/lexicon.hpp"
#include "neurolex/report.hpp"
#include "neurolex/robustness.hpp"
#include "neurolex/text.hpp"
#include "neurolex/tokenizer.hpp"

namespace neurolex::suite {

namespace {

std::vector<std::pair<std::string, fs::path>> inputs_of(const SuiteConfig& c) {
  std::vector<std::pair<std::string, fs::path>> out;
  const auto add = [&](const char* name, const std::optional<fs::path>& p) {
    if (p) out.emplace_back(name, *p);
  };
  add("lexicon", c.lexicon);
  add("vocab", c.vocab);
  add("corpus", c.corpus);
  add("scores", c.scores);
  add("corruption", c.corruption);
  add("span_predictions", c.span_predictions);
  add("ie_gold", c.ie_gold);
  add("ie_predictions", c.ie_predictions);
  add("tasks", c.tasks);
  add("task_predictions", c.task_predictions);
  add("adversarial", c.adversarial);
  add("adversarial_predictions", c.adversarial_predictions);
  add("bertscore", c.bertscore);
  for (const auto& [ratio, p] : c.ratio_predictions) out.emplace_back("ratio_predictions." + ratio, p);
  return out;
}

std::map<std::string, const metrics::PredictionRecord*> index_records(
    const std::vector<metrics::PredictionRecord>& records, const fs::path& origin) {
  std::map<std::string, const metrics::PredictionRecord*> out;
  for (const auto& r : records) {
    if (!out.emplace(r.id, &r).second) throw DataError(origin.string() + ": duplicate id " + r.id);
  }
  return out;
}

std::vector<std::pair<std::string, ie::SlotFrame>> frames_of(const std::vector<metrics::PredictionRecord>& records,
                                                             const lexicon::Lexicon& lexicon) {
  std::vector<std::pair<std::string, ie::SlotFrame>> out;
  for (const auto& r : records) out.emplace_back(r.id, ie::frame_parse(r.output.value_or(""), &lexicon).frame);
  return out;
}

std::string strip_prefix(const datagen::TaskExample& t) {
  std::string_view body = t.input;
  const std::string_view prefix = datagen::task_prefix(t.task);
  if (text::starts_with_ci(body, prefix)) body.remove_prefix(prefix.size());
  return std::string(body);
}

}  // namespace

SuiteResult run_suite(const SuiteConfig& config) {
  for (const auto& g : config.enabled) {
    if (!kGroups.count(g)) throw UsageError("unknown metric group \"" + g + "\"");
  }
  std::vector<std::string> missing;
  const auto inputs = inputs_of(config);
  for (const auto& [name, p] : inputs) {
    if (!fs::exists(p)) missing.push_back(name + "=" + p.string());
  }
  if (!missing.empty()) throw DataError("missing input files: " + text::join(missing, ", "));
  const auto enabled = [&](const std::string& g) { return config.enabled.empty() || config.enabled.count(g); };

  SuiteResult res;
  metrics::MetricReport& rep = res.report;
  for (const auto& [name, p] : inputs) rep.fingerprints[name] = hash::sha256_file(p);
  rep.config = {{"seed", config.seed}, {"calibration_bins", config.calibration_bins},
                {"enabled", config.enabled.empty() ? std::vector<std::string>(kGroups.begin(), kGroups.end())
                                                   : std::vector<std::string>(config.enabled.begin(), config.enabled.end())}};
  rep.notes = {
      "PPL: natural log, token-weighted pooling over all pieces of all records.",
      "Top-k: surface match after case-folding and whitespace collapse.",
      "Slot F1: micro P/R/F1 over canonical value instances; negation is binary F1 on the negated class; Avg. is the mean of the five slot F1s.",
      "ECE/MCE: equal-width bins, empty bins skipped.",
      "Term-Intro (reported as Term-Prec elsewhere): share of candidate terms absent from the source; lower is better.",
      "Fact-F1: each contradiction counts as one false positive and one false negative.",
      "BERTScore: externally computed values only; no encoder runs here.",
  };

  const lexicon::Lexicon lex = lexicon::load_lexicon(config.lexicon.value_or(lexicon::default_lexicon_path()));

  const auto ran = [&](const std::string& g) { res.ran.push_back(g); };

  if (enabled("tokenizer") && config.vocab && config.corpus) {
    const auto vocab = tokenizer::SubwordVocab::load(*config.vocab);
    std::vector<std::string> texts;
    for (const auto& p : corpus::read_paragraphs(*config.corpus)) texts.push_back(p.text);
    const auto m = tokenizer::eval_tokenizer(vocab, texts, lex);
    rep.set("tokenizer.oov", m.oov_rate, m.word_types, "% of distinct word types not encoded as a single piece");
    rep.set("tokenizer.as", m.avg_subwords, m.word_tokens, "mean pieces per word token");
    rep.set("tokenizer.ss", m.split_ratio, m.word_tokens, "% of word tokens split into two or more pieces");
    rep.set("tokenizer.mtr", m.multiword_ratio, m.term_occurrences,
            "pieces per word inside multi-word term occurrences");
    rep.set("tokenizer.mtr_per_term", m.multiword_ratio_per_term, m.term_occurrences,
            "pieces per multi-word term occurrence");
    ran("tokenizer");
  }

  if (enabled("ppl") && config.scores) {
    const auto records = metrics::read_predictions(*config.scores);
    metrics::PerplexityAccumulator all, imp(corpus::SectionKind::kImpression);
    for (const auto& r : records) {
      if (!r.has_nlls) throw DataError(config.scores->string() + ": record " + r.id + " has no token_nlls");
      all.add(r);
      imp.add(r);
    }
    rep.set("ppl.all", all.value(), all.pieces(), "exp(mean nll) over all pieces");
    if (imp.pieces() > 0) {
      rep.set("ppl.impression", imp.value(), imp.pieces(), "exp(mean nll) over IMPRESSION pieces");
    }
    ran("ppl");
  }

  if (enabled("topk") && config.corruption && config.span_predictions) {
    std::map<std::string, std::string> gold;
    jsonl::for_each(*config.corruption, [&](const Json& j, std::size_t) {
      const auto ex = datagen::corruption_from_json(j);
      for (const auto& s : ex.spans) gold[metrics::span_record_id(ex.id, s.sentinel)] = s.text;
    });
    const auto records = metrics::read_predictions(*config.span_predictions);
    for (std::size_t k : {std::size_t{1}, std::size_t{5}}) {
      const auto t = metrics::topk_accuracy(records, gold, k);
      rep.set("topk." + std::to_string(k), t.accuracy, t.total,
              "% of masked spans whose gold text is among the top-" + std::to_string(k) + " candidates");
    }
    ran("topk");
  }

  std::vector<ie::GoldLabel> gold_ie;
  if (config.ie_gold) gold_ie = ie::read_gold(*config.ie_gold, &lex);

  if (config.ie_gold && config.ie_predictions && (enabled("ie") || enabled("calibration"))) {
    const auto records = metrics::read_predictions(*config.ie_predictions);
    index_records(records, *config.ie_predictions);
    if (enabled("ie")) {
      const auto scores = ie::eval_slots(frames_of(records, lex), gold_ie, &lex);
      for (ie::Slot s : ie::kSlots) {
        const std::string key = "ie." + std::string(ie::to_string(s));
        rep.set(key + ".f1", scores[s].f1, scores.n, "slot F1");
        rep.set(key + ".precision", scores[s].precision, scores.n, "slot precision");
        rep.set(key + ".recall", scores[s].recall, scores.n, "slot recall");
      }
      rep.set("ie.macro_f1", scores.macro_f1, scores.n, "mean of the five slot F1s");
      ran("ie");
    }
    if (enabled("calibration")) {
      const auto points = metrics::slot_confidence_points(records, gold_ie, &lex);
      if (!points.empty()) {
        const auto cal = metrics::calibration(points, config.calibration_bins);
        rep.set("calib.ece", cal.ece, cal.n, "expected calibration error over slot confidences");
        rep.set("calib.mce", cal.mce, cal.n, "maximum calibration error over slot confidences");
        ran("calibration");
      }
    }
  }

  if (enabled("dataeff") && config.ie_gold && !config.ratio_predictions.empty()) {
    for (const auto& [ratio, p] : config.ratio_predictions) {
      const auto records = metrics::read_predictions(p);
      const auto scores = ie::eval_slots(frames_of(records, lex), gold_ie, &lex);
      char key[32];
      std::snprintf(key, sizeof key, "dataeff.%.2f", std::stod(ratio));
      rep.set(key, scores.macro_f1, scores.n, "IE macro F1 at label ratio " + ratio);
    }
    ran("dataeff");
  }

  if (config.tasks && config.task_predictions && (enabled("summarization") || enabled("faithfulness"))) {
    std::vector<datagen::TaskExample> tasks;
    jsonl::for_each(*config.tasks, [&](const Json& j, std::size_t) { tasks.push_back(datagen::task_from_json(j)); });
    const auto records = metrics::read_predictions(*config.task_predictions);
    const auto by_id = index_records(records, *config.task_predictions);
    const auto output_of = [&](const std::string& id) {
      auto it = by_id.find(id);
      return it == by_id.end() ? std::string() : it->second->output.value_or("");
    };
    double rouge = 0, fact = 0, intro = 0, contr = 0;
    std::size_t n_sum = 0, n_faith = 0;
    for (const auto& t : tasks) {
      if (t.task == datagen::Task::kQa) continue;
      const std::string out = output_of(t.id);
      const std::string source = strip_prefix(t);
      if (t.task == datagen::Task::kSummarize) {
        rouge += metrics::rouge_l(out, t.target).f1;
        fact += metrics::fact_f1(out, t.target, lex).f1;
        ++n_sum;
      }
      intro += metrics::term_intro_rate(out, source, lex);
      contr += metrics::contradiction_rate(out, source, lex);
      ++n_faith;
    }
    if (enabled("summarization") && n_sum) {
      rep.set("sum.rouge_l", rouge / static_cast<double>(n_sum), n_sum, "mean ROUGE-L F1 against the target");
      rep.set("sum.fact_f1", fact / static_cast<double>(n_sum), n_sum, "mean Fact-F1 against the target");
      if (config.bertscore) {
        double total = 0;
        std::size_t n = 0;
        jsonl::for_each(*config.bertscore, [&](const Json& j, std::size_t) {
          require_string(j, "id");
          const Json& v = require_field(j, "bertscore");
          if (!v.is_number()) throw DataError("\"bertscore\" must be a number");
          total += v.get<double>();
          ++n;
        });
        if (n) rep.set("sum.bertscore", total / static_cast<double>(n), n, "mean externally computed BERTScore F1");
      }
      ran("summarization");
    }
    if (enabled("faithfulness") && n_faith) {
      rep.set("term_intro", intro / static_cast<double>(n_faith), n_faith,
              "mean share of output terms absent from the source");
      rep.set("contr_rate", contr / static_cast<double>(n_faith), n_faith,
              "mean contradictions per output fact against the source");
      ran("faithfulness");
    }
  }

  if (enabled("negadv") && config.adversarial && config.adversarial_predictions) {
    const auto adv = robustness::read_adversarial(*config.adversarial, &lex);
    const auto records = metrics::read_predictions(*config.adversarial_predictions);
    std::vector<std::pair<std::string, bool>> preds;
    for (const auto& [id, frame] : frames_of(records, lex)) preds.emplace_back(id, frame.negation);
    const auto prf = robustness::eval_negadv(preds, adv);
    rep.set("negadv.f1", prf.f1, adv.size(), "binary F1 on the negated class over perturbed sentences");
    ran("negadv");
  }

  for (const auto& [name, v] : rep.values) {
    if (!std::isfinite(v.value)) rep.notes.push_back("non-finite value for " + name);
  }
  res.tables = report::render_all(rep);
  return res;
}

SuiteResult run_suite_and_write(const SuiteConfig& config) {
  SuiteResult res = run_suite(config);
  fs::create_directories(config.out_dir);
  const fs::path metrics_path = config.out_dir / "metrics.json";
  const fs::path tables_path = config.out_dir / "tables.txt";
  write_file(metrics_path, res.report.serialize());
  write_file(tables_path, res.tables);
  Json inputs = Json::object();
  for (const auto& [name, p] : inputs_of(config)) {
    inputs[name] = {{"path", p.string()}, {"sha256", res.report.fingerprints.at(name)}};
  }
  Json manifest = {{"inputs", inputs},
                   {"outputs",
                    {{"metrics.json", hash::sha256_file(metrics_path)}, {"tables.txt", hash::sha256_file(tables_path)}}},
                   {"groups", res.ran}};
  write_file(config.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return res;
}

}  // namespace neurolex::suite
