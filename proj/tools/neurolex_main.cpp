// neurolex command line: corpus preparation, dataset generation, tagging,
// perturbation, splitting, a mock model and the evaluation suite.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "neurolex/corpus.hpp"
#include "neurolex/datagen.hpp"
#include "neurolex/error.hpp"
#include "neurolex/harness.hpp"
#include "neurolex/ie.hpp"
#include "neurolex/jsonl.hpp"
#include "neurolex/lexicon.hpp"
#include "neurolex/metrics.hpp"
#include "neurolex/robustness.hpp"
#include "neurolex/suite.hpp"
#include "neurolex/text.hpp"
#include "neurolex/tokenizer.hpp"

namespace fs = std::filesystem;
using namespace neurolex;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out = "out";
  bool quiet = false;
  std::string lexicon;
};

Globals g;

void info(const std::string& msg) {
  if (!g.quiet) std::cerr << msg << "\n";
}

fs::path out_dir() {
  fs::create_directories(g.out);
  return g.out;
}

lexicon::Lexicon load_lex() {
  return lexicon::load_lexicon(g.lexicon.empty() ? lexicon::default_lexicon_path() : fs::path(g.lexicon));
}

std::vector<std::string> paragraph_texts(const std::vector<corpus::Paragraph>& ps) {
  std::vector<std::string> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back(p.text);
  return out;
}

// Sentence records from a JSONL file: {"id","text"} records are taken as is;
// paragraph records are split into sentences with ids "<pid>:s<k>".
std::vector<std::pair<std::string, std::string>> read_sentences(const fs::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t) {
    if (j.contains("report_id")) {
      const auto p = corpus::paragraph_from_json(j);
      const auto sentences = corpus::split_sentences(p.text);
      for (std::size_t i = 0; i < sentences.size(); ++i) {
        out.emplace_back(p.id() + ":s" + std::to_string(i), sentences[i]);
      }
    } else {
      out.emplace_back(require_string(j, "id"), require_string(j, "text"));
    }
  });
  return out;
}

// Plain id per line, or JSONL with "id" / "report_id".
std::vector<std::string> read_ids(const fs::path& path) {
  std::vector<std::string> out;
  if (path.extension() == ".jsonl") {
    std::set<std::string> seen;
    jsonl::for_each(path, [&](const Json& j, std::size_t) {
      const std::string id = j.contains("report_id") ? require_string(j, "report_id") : require_string(j, "id");
      if (seen.insert(id).second) out.push_back(id);
    });
    return out;
  }
  for (const auto& line : text::split(read_file(path), '\n')) {
    const auto t = text::trim(line);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string ratio_label(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG report language toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file mirroring the command-line flags");
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "suppress progress messages");
  app.add_option("--lexicon", g.lexicon, "lexicon file (JSONL or TSV)");

  // normalize
  auto* normalize = app.add_subcommand("normalize", "normalize, scrub and segment raw reports");
  std::string norm_input;
  bool no_scrub = false;
  std::vector<std::string> norm_drop;
  normalize->add_option("input", norm_input, "report .txt, directory of .txt, or JSONL")->required();
  normalize->add_flag("--no-scrub", no_scrub, "skip PHI scrubbing");
  normalize->add_option("--drop", norm_drop, "section kinds to drop (default HISTORY,MEDICATIONS; 'none' keeps all)")
      ->delimiter(',');

  // lexicon validate
  auto* lex_cmd = app.add_subcommand("lexicon", "lexicon tools");
  lex_cmd->require_subcommand(1);
  auto* lex_validate = lex_cmd->add_subcommand("validate", "check duplicates and category coverage");
  std::string validate_path;
  bool validate_json = false;
  lex_validate->add_option("path", validate_path, "lexicon file (defaults to --lexicon)");
  lex_validate->add_flag("--json", validate_json, "print JSON");

  // tokenizer train | eval
  auto* tok = app.add_subcommand("tokenizer", "subword vocabulary");
  tok->require_subcommand(1);
  auto* tok_train = tok->add_subcommand("train", "train a vocabulary");
  std::string tok_corpus, tok_vocab_out = "vocab.json";
  std::size_t vocab_size = 2048, min_pair = 1;
  bool protect = false;
  tok_train->add_option("--corpus", tok_corpus, "paragraphs.jsonl")->required();
  tok_train->add_option("--vocab-size", vocab_size)->capture_default_str();
  tok_train->add_option("--min-pair-count", min_pair)->capture_default_str();
  tok_train->add_flag("--protect-terms", protect, "keep multi-word lexicon terms atomic");
  tok_train->add_option("--name", tok_vocab_out, "file name inside --out")->capture_default_str();
  auto* tok_eval = tok->add_subcommand("eval", "OOV, AS, SS and MTR");
  std::string eval_vocab, eval_corpus;
  tok_eval->add_option("--vocab", eval_vocab)->required();
  tok_eval->add_option("--corpus", eval_corpus, "paragraphs.jsonl")->required();

  // corrupt
  auto* corrupt = app.add_subcommand("corrupt", "terminology-aware span corruption");
  std::string cor_corpus, cor_vocab;
  double budget = 0.15;
  bool no_terminal = false, topoff = false;
  corrupt->add_option("--corpus", cor_corpus, "paragraphs.jsonl")->required();
  corrupt->add_option("--vocab", cor_vocab, "vocab.json (byte fallback when omitted)");
  corrupt->add_option("--budget", budget)->capture_default_str();
  corrupt->add_flag("--no-terminal-sentinel", no_terminal);
  corrupt->add_flag("--topoff-random", topoff, "fill a shortfall with random words");

  // taskgen
  auto* taskgen = app.add_subcommand("taskgen", "polish, QA and summarization pairs");
  std::string tg_corpus, tg_refs, tg_pseudo, tg_vocab;
  std::vector<std::string> tg_tasks{"polish", "qa", "summarize"};
  taskgen->add_option("--corpus", tg_corpus, "paragraphs.jsonl");
  taskgen->add_option("--tasks", tg_tasks)->delimiter(',')->capture_default_str();
  taskgen->add_option("--references", tg_refs, "summary pseudo-labels JSONL {id,target}");
  taskgen->add_option("--pseudo-pairs", tg_pseudo, "polish pseudo-labels JSONL {id,input,target}");
  taskgen->add_option("--vocab", tg_vocab, "vocab.json used for length truncation");

  // tag
  auto* tag = app.add_subcommand("tag", "rule and dictionary slot tagger");
  std::string tag_input;
  tag->add_option("input", tag_input, "paragraphs.jsonl or JSONL {id,text}")->required();

  // perturb
  auto* perturb = app.add_subcommand("perturb", "negation-adversarial set");
  std::string pt_gold, pt_swaps;
  std::vector<std::string> pt_kinds{"CUE_SWAP", "SCOPE_SHIFT", "DOUBLE_NEG"};
  perturb->add_option("--gold", pt_gold, "gold JSONL with sentence text")->required();
  perturb->add_option("--kinds", pt_kinds)->delimiter(',')->capture_default_str();
  perturb->add_option("--swaps", pt_swaps, "cue swap table");

  // split
  auto* split = app.add_subcommand("split", "report-level train/valid/test split");
  std::string sp_input, sp_mode = "quota";
  std::vector<double> sp_ratios{0.8, 0.1, 0.1};
  split->add_option("input", sp_input, "paragraphs.jsonl, reports.jsonl or id list")->required();
  split->add_option("--ratios", sp_ratios)->delimiter(',')->expected(3)->capture_default_str();
  split->add_option("--mode", sp_mode)->check(CLI::IsMember({"quota", "threshold"}))->capture_default_str();

  // subsample
  auto* sub = app.add_subcommand("subsample", "nested label-ratio subsets");
  std::string sub_input;
  std::vector<double> sub_ratios{0.01, 0.05, 0.10, 0.25, 1.0};
  sub->add_option("input", sub_input, "id list or JSONL")->required();
  sub->add_option("--ratios", sub_ratios)->delimiter(',')->capture_default_str();

  // mock
  auto* mock = app.add_subcommand("mock", "deterministic baseline predictions");
  std::string mk_corpus, mk_vocab, mk_corruption, mk_tasks, mk_ie, mk_adv;
  std::size_t mk_topk = 5;
  mock->add_option("--corpus", mk_corpus, "paragraphs.jsonl (term frequencies and PPL scoring)");
  mock->add_option("--vocab", mk_vocab);
  mock->add_option("--corruption", mk_corruption);
  mock->add_option("--tasks", mk_tasks);
  mock->add_option("--ie", mk_ie, "sentences or gold JSONL");
  mock->add_option("--adversarial", mk_adv);
  mock->add_option("--top-k", mk_topk)->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "evaluation suite");
  suite::SuiteConfig sc;
  std::string ev_vocab, ev_corpus, ev_scores, ev_corruption, ev_spans, ev_gold, ev_ie, ev_tasks, ev_taskpred,
      ev_adv, ev_advpred, ev_bert;
  std::vector<std::string> ev_ratio_preds, ev_metrics;
  eval->add_option("--vocab", ev_vocab);
  eval->add_option("--corpus", ev_corpus, "paragraphs.jsonl");
  eval->add_option("--scores", ev_scores, "predictions with token_nlls");
  eval->add_option("--corruption", ev_corruption);
  eval->add_option("--span-predictions", ev_spans);
  eval->add_option("--ie-gold", ev_gold);
  eval->add_option("--ie-predictions", ev_ie);
  eval->add_option("--tasks", ev_tasks);
  eval->add_option("--task-predictions", ev_taskpred);
  eval->add_option("--adversarial", ev_adv);
  eval->add_option("--adversarial-predictions", ev_advpred);
  eval->add_option("--bertscore", ev_bert, "external JSONL {id,bertscore}");
  eval->add_option("--ratio-predictions", ev_ratio_preds, "RATIO=PATH IE predictions")->delimiter(',');
  eval->add_option("--metrics", ev_metrics, "groups to run")->delimiter(',');
  eval->add_option("--bins", sc.calibration_bins)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*normalize) {
      auto cfg = corpus::SegmentConfig::defaults();
      cfg.scrub = !no_scrub;
      if (!norm_drop.empty()) {
        cfg.dropped.clear();
        for (const auto& name : norm_drop) {
          if (text::to_upper(name) == "NONE") continue;
          try {
            cfg.dropped.insert(corpus::parse_section_kind(text::to_upper(name)));
          } catch (const DataError&) {
            throw UsageError("unknown section kind for --drop: " + name);
          }
        }
      }
      const auto raws = corpus::read_raw_reports(norm_input);
      const fs::path dir = out_dir();
      jsonl::Writer reports(dir / "reports.jsonl");
      jsonl::Writer paragraphs(dir / "paragraphs.jsonl");
      std::size_t n_par = 0, n_red = 0, n_invalid = 0, n_dropped = 0;
      for (const auto& raw : raws) {
        const auto seg = corpus::segment_report(raw, cfg);
        reports.write(corpus::to_json(seg.report));
        for (const auto& p : corpus::split_paragraphs(seg.report)) {
          paragraphs.write(corpus::to_json(p));
          ++n_par;
        }
        n_red += seg.report.redaction_count;
        n_invalid += seg.invalid_sequences;
        n_dropped += seg.dropped.size();
      }
      reports.close();
      paragraphs.close();
      info("reports=" + std::to_string(raws.size()) + " paragraphs=" + std::to_string(n_par) +
           " redactions=" + std::to_string(n_red) + " dropped_sections=" + std::to_string(n_dropped) +
           " invalid_utf8=" + std::to_string(n_invalid));
      return 0;
    }

    if (*lex_cmd) {
      const fs::path p = !validate_path.empty() ? fs::path(validate_path)
                         : !g.lexicon.empty()   ? fs::path(g.lexicon)
                                                : lexicon::default_lexicon_path();
      const std::string content = read_file(p);
      lexicon::Lexicon lex;
      try {
        lex = lexicon::parse_lexicon(content, p.extension() == ".tsv", p.string());
      } catch (const DataError& e) {
        std::cerr << e.what() << "\n";
        return 3;
      }
      const auto rep = lexicon::validate_lexicon(lex);
      std::cout << (validate_json ? rep.to_json(lex).dump(2) + "\n" : rep.to_text(lex));
      return rep.ok() ? 0 : 3;
    }

    if (*tok_train) {
      const auto lex = load_lex();
      const auto texts = paragraph_texts(corpus::read_paragraphs(tok_corpus));
      tokenizer::TrainConfig cfg;
      cfg.vocab_size = vocab_size;
      cfg.protect_terms = protect;
      cfg.seed = g.seed;
      cfg.min_pair_count = min_pair;
      const auto vocab = tokenizer::SubwordVocab::train(texts, cfg, lex);
      const fs::path p = out_dir() / tok_vocab_out;
      vocab.save(p);
      info("vocab " + p.string() + " size=" + std::to_string(vocab.size()) +
           " merges=" + std::to_string(vocab.merges().size()));
      return 0;
    }

    if (*tok_eval) {
      const auto lex = load_lex();
      const auto vocab = tokenizer::SubwordVocab::load(eval_vocab);
      const auto m = tokenizer::eval_tokenizer(vocab, paragraph_texts(corpus::read_paragraphs(eval_corpus)), lex);
      const std::string js = m.to_json().dump(2) + "\n";
      write_file(out_dir() / "tokenizer_metrics.json", js);
      std::cout << js;
      return 0;
    }

    if (*corrupt) {
      const auto lex = load_lex();
      const auto vocab = cor_vocab.empty() ? tokenizer::SubwordVocab::bytes_only()
                                           : tokenizer::SubwordVocab::load(cor_vocab);
      datagen::CorruptionOptions opt;
      opt.mask_budget = budget;
      opt.seed = g.seed;
      opt.terminal_sentinel = !no_terminal;
      opt.topoff_random = topoff;
      auto paragraphs = corpus::read_paragraphs(cor_corpus);
      std::sort(paragraphs.begin(), paragraphs.end(),
                [](const auto& a, const auto& b) { return a.id() < b.id(); });
      const fs::path dir = out_dir();
      jsonl::Writer out(dir / "corruption.jsonl");
      jsonl::Writer skipped(dir / "corruption_skipped.jsonl");
      std::size_t n_ok = 0, n_skip = 0, n_short = 0;
      double frac = 0;
      for (const auto& p : paragraphs) {
        const auto r = datagen::corrupt_spans(p.id(), p.text, lex, vocab, opt);
        if (r.status == datagen::CorruptionStatus::kSkipped) {
          skipped.write(Json{{"id", p.id()}, {"status", "SKIPPED"}, {"reason", r.skip_reason}});
          ++n_skip;
          continue;
        }
        out.write(datagen::to_json(r.example));
        frac += r.example.realized_mask_fraction;
        n_short += std::count(r.example.flags.begin(), r.example.flags.end(), "shortfall");
        ++n_ok;
      }
      out.close();
      skipped.close();
      info("examples=" + std::to_string(n_ok) + " skipped=" + std::to_string(n_skip) +
           " shortfall=" + std::to_string(n_short) +
           " mean_mask_fraction=" + std::to_string(n_ok ? frac / static_cast<double>(n_ok) : 0.0));
      return 0;
    }

    if (*taskgen) {
      const auto lex = load_lex();
      std::vector<corpus::Paragraph> paragraphs;
      if (!tg_corpus.empty()) paragraphs = corpus::read_paragraphs(tg_corpus);
      std::vector<datagen::TaskExample> all;
      std::size_t qa_skipped = 0;
      for (const auto& name : tg_tasks) {
        const auto task = datagen::parse_task(name);
        if (task != datagen::Task::kQa && tg_corpus.empty()) throw UsageError("--corpus is required for " + name);
        if (task == datagen::Task::kPolish) {
          std::vector<datagen::PseudoPair> pseudo;
          if (!tg_pseudo.empty()) pseudo = datagen::read_pseudo_pairs(tg_pseudo);
          auto v = datagen::build_polish_pairs(paragraphs, lex, g.seed, pseudo);
          all.insert(all.end(), v.begin(), v.end());
        } else if (task == datagen::Task::kQa) {
          auto b = datagen::build_qa_pairs(lex);
          qa_skipped = b.skipped;
          all.insert(all.end(), b.examples.begin(), b.examples.end());
        } else {
          std::optional<std::map<std::string, std::string>> refs;
          if (!tg_refs.empty()) refs = datagen::read_references(tg_refs);
          auto v = datagen::build_sum_pairs(paragraphs, lex, refs ? &*refs : nullptr);
          all.insert(all.end(), v.begin(), v.end());
        }
      }
      const auto vocab = tg_vocab.empty() ? tokenizer::SubwordVocab::bytes_only()
                                          : tokenizer::SubwordVocab::load(tg_vocab);
      jsonl::Writer out(out_dir() / "tasks.jsonl");
      std::size_t truncated = 0;
      for (auto& ex : all) {
        auto t = datagen::truncate_example(std::move(ex), vocab);
        truncated += t.flags.empty() ? 0 : 1;
        out.write(datagen::to_json(t));
      }
      out.close();
      info("examples=" + std::to_string(all.size()) + " truncated=" + std::to_string(truncated) +
           " qa_skipped_entries=" + std::to_string(qa_skipped));
      return 0;
    }

    if (*tag) {
      const auto lex = load_lex();
      jsonl::Writer out(out_dir() / "frames.jsonl");
      std::size_t n = 0;
      for (const auto& [id, sentence] : read_sentences(tag_input)) {
        out.write(ie::to_json(ie::FrameRecord{id, ie::tag_sentence(sentence, lex), {}}));
        ++n;
      }
      out.close();
      info("frames=" + std::to_string(n));
      return 0;
    }

    if (*perturb) {
      const auto lex = load_lex();
      const auto swaps = pt_swaps.empty() ? robustness::SwapTable::load(robustness::SwapTable::default_path())
                                          : robustness::SwapTable::load(pt_swaps);
      std::vector<robustness::PerturbKind> kinds;
      for (const auto& k : pt_kinds) kinds.push_back(robustness::parse_kind(k));
      const auto gold = ie::read_gold(pt_gold, &lex);
      const auto adv = robustness::build_adversarial_set(gold, kinds, lex, swaps, g.seed);
      jsonl::write_all(out_dir() / "adversarial.jsonl", [&] {
        std::vector<OrderedJson> v;
        for (const auto& e : adv) v.push_back(robustness::to_json(e));
        return v;
      }());
      info("sentences=" + std::to_string(gold.size()) + " perturbations=" + std::to_string(adv.size()));
      return 0;
    }

    if (*split) {
      harness::SplitRatios ratios{sp_ratios[0], sp_ratios[1], sp_ratios[2]};
      const auto mode = sp_mode == "threshold" ? harness::SplitMode::kThreshold : harness::SplitMode::kQuota;
      const auto ids = read_ids(sp_input);
      const auto a = harness::split_corpus(ids, ratios, g.seed, mode);
      const fs::path dir = out_dir();
      write_file(dir / "split.json", a.to_json().dump(1) + "\n");
      // Paragraph files are partitioned by their report's bucket.
      if (fs::path(sp_input).extension() == ".jsonl") {
        bool is_paragraphs = false;
        jsonl::for_each(sp_input, [&](const Json& j, std::size_t line) {
          if (line == 1) is_paragraphs = j.contains("report_id");
        });
        if (is_paragraphs) {
          jsonl::Writer tr(dir / "train.jsonl"), va(dir / "valid.jsonl"), te(dir / "test.jsonl");
          for (const auto& p : corpus::read_paragraphs(sp_input)) {
            switch (a.buckets.at(p.report_id)) {
              case harness::Bucket::kTrain: tr.write(corpus::to_json(p)); break;
              case harness::Bucket::kValid: va.write(corpus::to_json(p)); break;
              case harness::Bucket::kTest: te.write(corpus::to_json(p)); break;
            }
          }
          tr.close();
          va.close();
          te.close();
        }
      }
      const auto c = a.counts();
      info("TRAIN=" + std::to_string(c[0]) + " VALID=" + std::to_string(c[1]) + " TEST=" + std::to_string(c[2]));
      return 0;
    }

    if (*sub) {
      const auto ids = read_ids(sub_input);
      const fs::path dir = out_dir();
      for (double r : sub_ratios) {
        const auto chosen = harness::subsample(ids, r, g.seed);
        write_file(dir / ("subsample_" + ratio_label(r) + ".txt"), text::join(chosen, "\n") + (chosen.empty() ? "" : "\n"));
        info(ratio_label(r) + ": " + std::to_string(chosen.size()));
      }
      return 0;
    }

    if (*mock) {
      const auto lex = load_lex();
      const auto vocab = mk_vocab.empty() ? tokenizer::SubwordVocab::bytes_only()
                                          : tokenizer::SubwordVocab::load(mk_vocab);
      std::vector<corpus::Paragraph> paragraphs;
      if (!mk_corpus.empty()) paragraphs = corpus::read_paragraphs(mk_corpus);
      const harness::MockModel model(lex, vocab, paragraph_texts(paragraphs), mk_topk);
      const fs::path dir = out_dir();
      if (!paragraphs.empty()) {
        jsonl::Writer out(dir / "pred_scores.jsonl");
        for (const auto& p : paragraphs) out.write(metrics::to_json(model.score_text(p.id(), p.text, p.section)));
        out.close();
      }
      if (!mk_corruption.empty()) {
        jsonl::Writer out(dir / "pred_spans.jsonl");
        jsonl::for_each(mk_corruption, [&](const Json& j, std::size_t) {
          for (const auto& r : model.predict_spans(datagen::corruption_from_json(j))) out.write(metrics::to_json(r));
        });
        out.close();
      }
      if (!mk_tasks.empty()) {
        jsonl::Writer out(dir / "pred_tasks.jsonl");
        jsonl::for_each(mk_tasks, [&](const Json& j, std::size_t) {
          out.write(metrics::to_json(model.predict_task(datagen::task_from_json(j))));
        });
        out.close();
      }
      if (!mk_ie.empty()) {
        jsonl::Writer out(dir / "pred_ie.jsonl");
        for (const auto& [id, sentence] : read_sentences(mk_ie)) out.write(metrics::to_json(model.predict_frame(id, sentence)));
        out.close();
      }
      if (!mk_adv.empty()) {
        jsonl::Writer out(dir / "pred_adv.jsonl");
        for (const auto& e : robustness::read_adversarial(mk_adv, &lex)) {
          out.write(metrics::to_json(model.predict_frame(e.id, e.input)));
        }
        out.close();
      }
      info("mock predictions written to " + dir.string());
      return 0;
    }

    if (*eval) {
      sc.out_dir = out_dir();
      sc.seed = g.seed;
      const auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
      if (!g.lexicon.empty()) sc.lexicon = g.lexicon;
      sc.vocab = opt(ev_vocab);
      sc.corpus = opt(ev_corpus);
      sc.scores = opt(ev_scores);
      sc.corruption = opt(ev_corruption);
      sc.span_predictions = opt(ev_spans);
      sc.ie_gold = opt(ev_gold);
      sc.ie_predictions = opt(ev_ie);
      sc.tasks = opt(ev_tasks);
      sc.task_predictions = opt(ev_taskpred);
      sc.adversarial = opt(ev_adv);
      sc.adversarial_predictions = opt(ev_advpred);
      sc.bertscore = opt(ev_bert);
      for (const auto& item : ev_ratio_preds) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("--ratio-predictions expects RATIO=PATH");
        sc.ratio_predictions[item.substr(0, eq)] = item.substr(eq + 1);
      }
      sc.enabled.insert(ev_metrics.begin(), ev_metrics.end());
      const auto res = suite::run_suite_and_write(sc);
      if (!g.quiet) std::cout << res.tables;
      info("groups: " + text::join(res.ran, ", "));
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
