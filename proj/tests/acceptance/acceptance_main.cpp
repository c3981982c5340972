// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "neurolex/datagen.hpp"
#include "neurolex/harness.hpp"
#include "neurolex/hash.hpp"
#include "neurolex/ie.hpp"
#include "neurolex/jsonl.hpp"
#include "neurolex/metrics.hpp"
#include "neurolex/robustness.hpp"
#include "neurolex/suite.hpp"
#include "neurolex/text.hpp"
#include "neurolex/tokenizer.hpp"
#include "test_support.hpp"

using namespace neurolex;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string str(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << std::fixed << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(1);
  os << std::scientific << v;
  return os.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const lexicon::Lexicon& lex() { return testkit::starter(); }

std::vector<std::string> fixture_texts() {
  std::vector<std::string> out;
  for (const auto& p : testkit::fixture_paragraphs()) out.push_back(p.text);
  return out;
}

tokenizer::TrainConfig default_train_config(bool protect = false) {
  tokenizer::TrainConfig cfg;
  cfg.vocab_size = 2048;
  cfg.seed = 7;
  cfg.protect_terms = protect;
  return cfg;
}

const tokenizer::SubwordVocab& fixture_vocab() {
  static const tokenizer::SubwordVocab v = tokenizer::SubwordVocab::train(fixture_texts(), default_train_config(), lex());
  return v;
}

// Sentinel indices in order of appearance.
std::vector<std::size_t> sentinel_sequence(const std::string& s) {
  static const std::regex re("<extra_id_([0-9]+)>");
  std::vector<std::size_t> out;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back(std::stoul((*it)[1].str()));
  }
  return out;
}

// ---- corruption ---------------------------------------------------------------

Outcome corruption_invertibility() {
  const auto& paras = testkit::fixture_paragraphs();
  const auto& vocab = fixture_vocab();
  std::size_t emitted = 0, exact = 0, contiguous = 0;
  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < paras.size(); ++i) {
    datagen::CorruptionOptions o;
    o.seed = i;
    const auto r = datagen::corrupt_spans(paras[i].id(), paras[i].text, lex(), vocab, o);
    if (r.status != datagen::CorruptionStatus::kOk) continue;
    ++emitted;
    const auto& e = r.example;
    exact += datagen::reconstruct(e.input, e.target) == paras[i].text;
    const auto in = sentinel_sequence(e.input);
    const auto tg = sentinel_sequence(e.target);
    bool ok = !in.empty() && tg.size() == in.size() + 1;
    for (std::size_t k = 0; ok && k < in.size(); ++k) ok = in[k] == k && tg[k] == k;
    ok = ok && tg.back() == in.size();
    contiguous += ok;
  }
  const double secs = seconds_since(t0);
  return {emitted > 0 && exact == emitted && contiguous == emitted && secs < 10.0,
          std::to_string(paras.size()) + " paragraphs, " + std::to_string(emitted) + " emitted, exact " +
              std::to_string(exact) + ", contiguous " + std::to_string(contiguous) + ", " + str(secs, 2) + " s"};
}

Outcome mask_budget() {
  const auto& paras = testkit::fixture_paragraphs();
  const auto& vocab = fixture_vocab();
  // Coverage: share of paragraph pieces inside non-cue term matches.
  std::size_t covered_pieces = 0, total_pieces = 0;
  double fraction_sum = 0;
  std::size_t emitted = 0, violations = 0, miscounted = 0;
  for (std::size_t i = 0; i < paras.size(); ++i) {
    const std::string& text = paras[i].text;
    std::vector<bool> in_term(text.size(), false);
    for (const auto& m : lexicon::find_terms(text, lex())) {
      if (lex().entry(m.entry).category == lexicon::TermCategory::kNegationCue) continue;
      covered_pieces += vocab.count_tokens(std::string_view(text).substr(m.offset, m.length));
      for (std::size_t c = m.offset; c < m.end(); ++c) in_term[c] = true;
    }
    const std::size_t pieces = vocab.count_tokens(text);
    total_pieces += pieces;

    datagen::CorruptionOptions o;
    o.seed = i;
    const auto r = datagen::corrupt_spans(paras[i].id(), text, lex(), vocab, o);
    if (r.status != datagen::CorruptionStatus::kOk) continue;
    ++emitted;
    std::size_t masked = 0;
    for (const auto& s : r.example.spans) {
      masked += vocab.count_tokens(s.text);
      for (std::size_t c = 0; c < s.text.size(); ++c) {
        if (!text::is_ascii_space(s.text[c]) && !in_term[s.offset + c]) ++violations;
      }
    }
    const double realized = static_cast<double>(masked) / static_cast<double>(pieces);
    if (std::abs(realized - r.example.realized_mask_fraction) > 1e-12) ++miscounted;
    fraction_sum += realized;
  }
  const double coverage = static_cast<double>(covered_pieces) / static_cast<double>(total_pieces);
  const double mean = emitted ? fraction_sum / static_cast<double>(emitted) : 0.0;
  return {coverage >= 0.20 && mean >= 0.13 && mean <= 0.17 && violations == 0 && miscounted == 0,
          "term coverage " + str(coverage) + ", mean realized fraction " + str(mean) + " over " +
              std::to_string(emitted) + ", violations " + std::to_string(violations) + ", miscounted " +
              std::to_string(miscounted)};
}

// ---- tokenizer ----------------------------------------------------------------

Outcome tokenizer_round_trip() {
  std::ifstream in(testkit::data_dir() / "fixtures" / "fuzz_10k.txt", std::ios::binary);
  std::string line;
  std::size_t n = 0, exact = 0;
  while (std::getline(in, line)) {
    ++n;
    exact += fixture_vocab().decode(fixture_vocab().encode(line)) == line;
  }
  return {n == 10000 && exact == n, std::to_string(exact) + "/" + std::to_string(n) + " lines exact"};
}

Outcome tokenizer_saturation() {
  const std::vector<std::string> corpus = {"alpha beta", "beta alpha alpha", "gamma alpha beta"};
  const lexicon::Lexicon l({{"alpha beta", {}, lexicon::TermCategory::kPattern, {}}});
  tokenizer::TrainConfig cfg;
  cfg.vocab_size = 4096;
  const auto m = tokenizer::eval_tokenizer(tokenizer::SubwordVocab::train(corpus, cfg, l), corpus, l);
  return {m.oov_rate == 0.0 && m.avg_subwords == 1.0 && m.split_ratio == 0.0 && m.multiword_ratio == 1.0,
          "OOV " + str(m.oov_rate) + ", AS " + str(m.avg_subwords) + ", SS " + str(m.split_ratio) + ", MTR " +
              str(m.multiword_ratio)};
}

Outcome tokenizer_protected_mtr() {
  const auto texts = fixture_texts();
  const auto plain = tokenizer::eval_tokenizer(fixture_vocab(), texts, lex());
  const auto prot = tokenizer::eval_tokenizer(
      tokenizer::SubwordVocab::train(texts, default_train_config(true), lex()), texts, lex());
  return {prot.multiword_ratio < plain.multiword_ratio,
          "protected " + str(prot.multiword_ratio) + " vs unprotected " + str(plain.multiword_ratio)};
}

Outcome tokenizer_determinism() {
  const auto texts = fixture_texts();
  const std::string a = tokenizer::SubwordVocab::train(texts, default_train_config(), lex()).serialize();
  const std::string b = tokenizer::SubwordVocab::train(texts, default_train_config(), lex()).serialize();
  return {a == b, "sha256 " + hash::sha256_hex(a).substr(0, 16) + " / " + hash::sha256_hex(b).substr(0, 16)};
}

// ---- metrics ------------------------------------------------------------------

std::size_t dp_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

Outcome rouge_oracle() {
  static const std::vector<std::string> words = {"focal", "slowing", "left", "Temporal", "spikes,", "no",
                                                 "the",   "of",      "a",    "delta.",   "Hz",      "3"};
  std::mt19937_64 g(2024);
  const auto sentence = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + words[g() % words.size()];
    return s;
  };
  std::size_t exact = 0;
  for (int i = 0; i < 500; ++i) {
    const std::string c = sentence(1 + g() % 120);
    const std::string r = sentence(1 + g() % 120);
    const auto ct = metrics::rouge_tokens(c);
    const auto rt = metrics::rouge_tokens(r);
    const std::size_t lcs = dp_lcs(ct, rt);
    const double p = static_cast<double>(lcs) / static_cast<double>(ct.size());
    const double rc = static_cast<double>(lcs) / static_cast<double>(rt.size());
    const double f = lcs ? 2 * p * rc / (p + rc) : 0.0;
    const auto got = metrics::rouge_l(c, r);
    exact += got.precision == p && got.recall == rc && got.f1 == f;
  }
  return {exact == 500, std::to_string(exact) + "/500 pairs exact"};
}

Outcome calibration_oracle() {
  std::mt19937_64 g(99);
  std::vector<std::pair<double, bool>> pts;
  for (int i = 0; i < 100; ++i) {
    double c = std::uniform_real_distribution<double>(0.0, 1.0)(g);
    if (i % 19 == 0) c = 1.0;
    if (i % 13 == 0) c = 0.5;
    pts.emplace_back(c, g() % 4 != 0);
  }
  const std::size_t bins = 10;
  double ece = 0, mce = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = static_cast<double>(b) / bins;
    const double hi = static_cast<double>(b + 1) / bins;
    double conf = 0, acc = 0;
    std::size_t n = 0;
    for (const auto& [c, ok] : pts) {
      const bool inside = b + 1 == bins ? (c >= lo && c <= hi) : (c >= lo && c < hi);
      if (!inside) continue;
      ++n;
      conf += c;
      acc += ok;
    }
    if (n == 0) continue;
    const double gap = std::abs(acc / n - conf / n);
    ece += static_cast<double>(n) / static_cast<double>(pts.size()) * gap;
    mce = std::max(mce, gap);
  }
  const auto got = metrics::calibration(pts, bins);
  const double de = std::abs(got.ece - ece), dm = std::abs(got.mce - mce);
  return {de <= 1e-12 && dm <= 1e-12, "|dECE| " + sci(de) + ", |dMCE| " + sci(dm)};
}

Outcome uniform_perplexity() {
  const testkit::TempDir dir("accept_ppl");
  const harness::MockModel model(lex(), fixture_vocab(), {});
  {
    jsonl::Writer w(dir / "scores.jsonl");
    for (const auto& p : testkit::fixture_paragraphs()) w.write(metrics::to_json(model.score_text(p.id(), p.text, p.section)));
  }
  const double ppl = metrics::perplexity(metrics::read_predictions(dir / "scores.jsonl"));
  const double v = static_cast<double>(fixture_vocab().size());
  const double rel = std::abs(ppl - v) / v;
  return {rel <= 1e-9, "PPL " + str(ppl, 6) + ", V " + str(v, 0) + ", relative error " + sci(rel)};
}

Outcome fact_self_score() {
  const auto& paras = testkit::fixture_paragraphs();
  std::size_t ones = 0;
  for (std::size_t i = 0; i < 200; ++i) ones += metrics::fact_f1(paras[i].text, paras[i].text, lex()).f1 == 1.0;
  return {ones == 200, std::to_string(ones) + "/200 texts score 1"};
}

// ---- ie -----------------------------------------------------------------------

std::vector<std::string> canonicals_of(lexicon::TermCategory c) {
  std::vector<std::string> out;
  for (const auto& e : lex().entries()) {
    if (e.category == c) out.push_back(e.canonical);
  }
  return out;
}

Outcome frame_round_trip() {
  const auto lats = canonicals_of(lexicon::TermCategory::kLaterality);
  const auto locs = canonicals_of(lexicon::TermCategory::kLocalization);
  const auto pats = canonicals_of(lexicon::TermCategory::kPattern);
  const auto bands = canonicals_of(lexicon::TermCategory::kFrequency);
  std::mt19937_64 g(31);
  std::size_t exact = 0;
  for (int i = 0; i < 1000; ++i) {
    ie::SlotFrame f;
    if (g() % 2) f.laterality = lats[g() % lats.size()];
    for (auto* into : {&f.localization, &f.pattern}) {
      const auto& from = into == &f.localization ? locs : pats;
      for (std::size_t k = g() % 4; k > 0; --k) {
        const std::string& v = from[g() % from.size()];
        if (std::find(into->begin(), into->end(), v) == into->end()) into->push_back(v);
      }
    }
    switch (g() % 3) {
      case 0: break;
      case 1: f.frequency = ie::Frequency{std::uniform_real_distribution<double>(0.01, 100.0)(g), std::nullopt}; break;
      default: f.frequency = ie::Frequency{std::nullopt, bands[g() % bands.size()]}; break;
    }
    f.negation = g() % 2;
    const auto back = ie::frame_parse(ie::frame_serialize(f), &lex());
    exact += back.flags.empty() && back.frame == f;
  }
  return {exact == 1000, std::to_string(exact) + "/1000 frames exact"};
}

Outcome microsuite_agreement() {
  const auto gold = ie::read_gold(testkit::data_dir() / "microsuite" / "ie_gold.jsonl", &lex());
  std::map<ie::Slot, std::size_t> agree;
  for (const auto& g : gold) {
    const auto pred = ie::tag_sentence(g.text, lex());
    for (ie::Slot s : ie::kSlots) agree[s] += ie::slot_values(pred, s) == ie::slot_values(g.frame, s);
  }
  bool ok = gold.size() == 30;
  std::string detail;
  for (ie::Slot s : ie::kSlots) {
    const double acc = static_cast<double>(agree[s]) / static_cast<double>(gold.size());
    ok = ok && acc >= 0.95;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(ie::to_string(s)) + " " + str(acc, 3);
  }
  return {ok, std::to_string(gold.size()) + " sentences; " + detail};
}

double fraction(const std::string& s) {
  const auto parts = text::split(s, '/');
  return std::stod(parts.at(0)) / std::stod(parts.at(1));
}

Outcome planted_error_oracle() {
  const auto dir = testkit::test_data_dir() / "slot_planted";
  const auto gold = ie::read_gold(dir / "gold.jsonl", &lex());
  std::vector<std::pair<std::string, ie::SlotFrame>> preds;
  for (const auto& r : ie::read_frames(dir / "pred.jsonl", &lex())) preds.emplace_back(r.id, r.frame);
  const auto s = ie::eval_slots(preds, gold, &lex());
  std::ifstream csv(dir / "oracle.csv");
  std::string line;
  std::getline(csv, line);
  double worst = 0;
  std::size_t rows = 0, count_mismatch = 0;
  while (std::getline(csv, line)) {
    const auto c = text::split(line, ',');
    ++rows;
    if (c[0] == "macro") {
      worst = std::max(worst, std::abs(s.macro_f1 - fraction(c[6])));
      continue;
    }
    const auto it = std::find_if(ie::kSlots.begin(), ie::kSlots.end(), [&](ie::Slot x) { return ie::to_string(x) == c[0]; });
    if (it == ie::kSlots.end()) return {false, "unknown slot " + c[0]};
    const auto& p = s[*it];
    count_mismatch += p.tp != std::stoul(c[1]) || p.fp != std::stoul(c[2]) || p.fn != std::stoul(c[3]);
    worst = std::max({worst, std::abs(p.precision - fraction(c[4])), std::abs(p.recall - fraction(c[5])),
                      std::abs(p.f1 - fraction(c[6]))});
  }
  return {rows == 6 && count_mismatch == 0 && worst <= 1e-9,
          "max deviation " + sci(worst) + ", count mismatches " + std::to_string(count_mismatch)};
}

// ---- robustness ---------------------------------------------------------------

Outcome robustness_consistency() {
  const auto gold = ie::read_gold(testkit::data_dir() / "microsuite" / "ie_gold.jsonl", &lex());
  const auto swaps = robustness::SwapTable::load(robustness::SwapTable::default_path());
  std::size_t emitted = 0, consistent = 0;
  std::map<robustness::PerturbKind, std::size_t> per_kind;
  for (const auto& g : gold) {
    for (robustness::PerturbKind k : robustness::kAllKinds) {
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto r = robustness::perturb(g.text, g.frame, k, lex(), swaps, seed);
        if (!r) continue;
        ++emitted;
        ++per_kind[k];
        const bool before = ie::tag_sentence(r->perturbation.original, lex()).negation;
        const bool after = ie::tag_sentence(r->perturbation.perturbed, lex()).negation;
        const bool want = r->perturbation.transform == robustness::LabelTransform::kFlip ? !before : before;
        consistent += after == want && r->gold.negation == want;
      }
    }
  }
  std::string detail = std::to_string(consistent) + "/" + std::to_string(emitted) + " consistent (";
  bool every_kind = true;
  for (robustness::PerturbKind k : robustness::kAllKinds) {
    every_kind = every_kind && per_kind[k] > 0;
    detail += std::string(robustness::to_string(k)) + " " + std::to_string(per_kind[k]) + " ";
  }
  detail.back() = ')';
  return {every_kind && consistent == emitted, detail};
}

// ---- harness ------------------------------------------------------------------

Outcome split_criteria() {
  std::vector<std::string> reports;
  for (int i = 0; i < 10000; ++i) reports.push_back("rpt" + std::to_string(i));
  const auto a = harness::split_corpus(reports, {}, 5);
  const auto b = harness::split_corpus(reports, {}, 5);
  const bool deterministic = a.buckets == b.buckets;
  // Three paragraphs per report, routed by their report id.
  std::map<harness::Bucket, std::set<std::string>> report_sets;
  for (const auto& r : reports) {
    for (const char* sec : {"FINDINGS:0", "FINDINGS:1", "IMPRESSION:0"}) {
      const std::string pid = r + ":" + sec;
      report_sets[a.buckets.at(harness::report_of_paragraph(pid))].insert(harness::report_of_paragraph(pid));
    }
  }
  std::size_t overlap = 0;
  for (const auto& x : report_sets[harness::Bucket::kTrain]) {
    overlap += report_sets[harness::Bucket::kValid].count(x) + report_sets[harness::Bucket::kTest].count(x);
  }
  for (const auto& x : report_sets[harness::Bucket::kValid]) overlap += report_sets[harness::Bucket::kTest].count(x);
  const auto c = a.counts();
  const std::array<double, 3> want{0.8, 0.1, 0.1};
  bool within = c[0] + c[1] + c[2] == reports.size();
  for (std::size_t i = 0; i < 3; ++i) within = within && std::abs(c[i] / 10000.0 - want[i]) <= 0.01;
  return {deterministic && overlap == 0 && within,
          "sizes " + std::to_string(c[0]) + "/" + std::to_string(c[1]) + "/" + std::to_string(c[2]) +
              ", deterministic " + (deterministic ? "yes" : "no") + ", leaked reports " + std::to_string(overlap)};
}

Outcome subsample_nesting() {
  std::vector<std::string> ids;
  for (int i = 0; i < 1000; ++i) ids.push_back("r" + std::to_string(i));
  std::mt19937_64 g(77);
  std::size_t violations = 0;
  for (int s = 0; s < 20; ++s) {
    const std::uint64_t seed = g();
    std::set<std::string> prev;
    for (double r : harness::kLabelRatios) {
      const auto cur = harness::subsample(ids, r, seed);
      const std::set<std::string> cur_set(cur.begin(), cur.end());
      if (!std::includes(cur_set.begin(), cur_set.end(), prev.begin(), prev.end())) ++violations;
      prev = cur_set;
    }
  }
  return {violations == 0, "20 seeds, nesting violations " + std::to_string(violations)};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

Outcome end_to_end_smoke() {
  const testkit::TempDir dir("accept_e2e");
  const auto w = dir.path();
  const auto log = w / "log.txt";
  const auto t0 = Clock::now();
  const auto gold = testkit::data_dir() / "microsuite" / "ie_gold.jsonl";
  const auto para = w / "norm" / "paragraphs.jsonl";
  const auto vocab = w / "tok" / "vocab.json";
  const std::vector<std::string> steps = {
      "normalize " + q(testkit::data_dir() / "fixtures" / "raw_reports.jsonl") + " --out " + q(w / "norm"),
      "tokenizer train --corpus " + q(para) + " --out " + q(w / "tok"),
      "corrupt --corpus " + q(para) + " --vocab " + q(vocab) + " --out " + q(w / "cor"),
      "taskgen --corpus " + q(para) + " --vocab " + q(vocab) + " --out " + q(w / "tasks"),
      "tag " + q(para) + " --out " + q(w / "tag"),
      "perturb --gold " + q(gold) + " --out " + q(w / "adv"),
      "split " + q(para) + " --out " + q(w / "split"),
      "mock --corpus " + q(para) + " --vocab " + q(vocab) + " --corruption " + q(w / "cor" / "corruption.jsonl") +
          " --tasks " + q(w / "tasks" / "tasks.jsonl") + " --ie " + q(gold) + " --adversarial " +
          q(w / "adv" / "adversarial.jsonl") + " --out " + q(w / "mock"),
      "eval --vocab " + q(vocab) + " --corpus " + q(para) + " --scores " + q(w / "mock" / "pred_scores.jsonl") +
          " --corruption " + q(w / "cor" / "corruption.jsonl") + " --span-predictions " +
          q(w / "mock" / "pred_spans.jsonl") + " --ie-gold " + q(gold) + " --ie-predictions " +
          q(w / "mock" / "pred_ie.jsonl") + " --tasks " + q(w / "tasks" / "tasks.jsonl") + " --task-predictions " +
          q(w / "mock" / "pred_tasks.jsonl") + " --adversarial " + q(w / "adv" / "adversarial.jsonl") +
          " --adversarial-predictions " + q(w / "mock" / "pred_adv.jsonl") + " --ratio-predictions 1.0=" +
          q(w / "mock" / "pred_ie.jsonl") + " --out " + q(w / "eval"),
  };
  for (const auto& step : steps) {
    const int rc = testkit::run_cli("--quiet --seed 1 " + step, log);
    if (rc != 0) return {false, "exit " + std::to_string(rc) + " on: " + step.substr(0, step.find(' ')) + "\n" + read_file(log)};
  }
  const double secs = seconds_since(t0);
  const Json m = Json::parse(read_file(w / "eval" / "metrics.json"))["metrics"];
  const Json manifest = Json::parse(read_file(w / "eval" / "manifest.json"));
  std::size_t finite = 0;
  std::vector<std::string> bad;
  for (const auto& [k, v] : m.items()) {
    if (v["value"].is_number() && std::isfinite(v["value"].get<double>())) {
      ++finite;
    } else {
      bad.push_back(k);
    }
  }
  const std::size_t groups = manifest["groups"].size();
  return {bad.empty() && groups == suite::kGroups.size() && secs < 60.0,
          std::to_string(finite) + " metrics finite" + (bad.empty() ? "" : ", non-finite: " + text::join(bad, ",")) +
              ", " + std::to_string(groups) + "/" + std::to_string(suite::kGroups.size()) + " groups, " +
              str(secs, 2) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"corruption invertibility", corruption_invertibility},
      {"mask budget", mask_budget},
      {"tokenizer fuzz round trip", tokenizer_round_trip},
      {"tokenizer saturation", tokenizer_saturation},
      {"tokenizer protected MTR", tokenizer_protected_mtr},
      {"tokenizer determinism", tokenizer_determinism},
      {"ROUGE-L vs LCS oracle", rouge_oracle},
      {"ECE/MCE vs bin loop", calibration_oracle},
      {"uniform-stub perplexity", uniform_perplexity},
      {"Fact-F1 self score", fact_self_score},
      {"frame round trip", frame_round_trip},
      {"micro-suite agreement", microsuite_agreement},
      {"planted-error slot oracle", planted_error_oracle},
      {"robustness consistency", robustness_consistency},
      {"split sizes, determinism, leakage", split_criteria},
      {"subsample nesting", subsample_nesting},
      {"end-to-end smoke", end_to_end_smoke},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.ok;
    std::cout << (o.ok ? "PASS  " : "FAIL  ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
