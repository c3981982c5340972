#include "neurolex/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace neurolex::report {

namespace {

std::string fmt(double v, int precision) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::vector<ReferenceRow> model_rows(const std::vector<std::vector<double>>& v) {
  static const char* kLabels[] = {"Flan-T5 Base", "+ DAPT", "+ SFT", "+ DAPT -> SFT"};
  std::vector<ReferenceRow> rows;
  for (std::size_t i = 0; i < v.size(); ++i) rows.push_back({kLabels[i], v[i]});
  return rows;
}

}  // namespace

const std::vector<TableSpec>& standard_tables() {
  static const std::vector<TableSpec> tables = [] {
    std::vector<TableSpec> t;
    t.push_back({"Tokenizer coverage",
                 "Tokenizer",
                 {{"OOV (%)", "tokenizer.oov", 2},
                  {"AS", "tokenizer.as", 2},
                  {"SS (%)", "tokenizer.ss", 2},
                  {"MTR", "tokenizer.mtr", 2}},
                 {{"Flan-T5 Base", {49.04, 3.38, 80.23, 1.75}}, {"EEG-based", {10.19, 1.96, 40.70, 1.06}}}});
    t.push_back({"Intrinsic language modeling",
                 "Model",
                 {{"PPL (All)", "ppl.all", 2},
                  {"PPL (Imp.)", "ppl.impression", 2},
                  {"Top-1 (%)", "topk.1", 2},
                  {"Top-5 (%)", "topk.5", 2}},
                 model_rows({{16.98, 5.92, 2.60, 2.90},
                             {805.08, 562.23, 72.10, 82.30},
                             {5.73, 4.68, 56.00, 64.50},
                             {6.08, 5.29, 74.60, 84.20}})});
    t.push_back({"Slot-level IE F1",
                 "Model",
                 {{"Lat.", "ie.laterality.f1", 3},
                  {"Loc.", "ie.localization.f1", 3},
                  {"Patt.", "ie.pattern.f1", 3},
                  {"Freq.", "ie.frequency.f1", 3},
                  {"Neg.", "ie.negation.f1", 3},
                  {"Avg.", "ie.macro_f1", 3}},
                 model_rows({{0.197, 0.147, 0.122, 0.225, 0.442, 0.227},
                             {0.615, 0.505, 0.239, 0.225, 0.442, 0.405},
                             {0.527, 0.543, 0.280, 0.517, 0.551, 0.484},
                             {0.484, 0.621, 0.401, 0.678, 0.693, 0.575}})});
    t.push_back({"Paragraph summarization",
                 "Model",
                 {{"ROUGE-L", "sum.rouge_l", 3}, {"BERTScore", "sum.bertscore", 3}, {"Fact-F1", "sum.fact_f1", 3}},
                 model_rows({{0.214, 0.848, 0.742},
                             {0.103, 0.807, 0.736},
                             {0.695, 0.955, 0.942},
                             {0.707, 0.956, 0.941}})});
    t.push_back({"Data efficiency (IE Macro-F1)",
                 "Label Ratio",
                 {{"1 %", "dataeff.0.01", 3},
                  {"5 %", "dataeff.0.05", 3},
                  {"10 %", "dataeff.0.10", 3},
                  {"25 %", "dataeff.0.25", 3},
                  {"100 %", "dataeff.1.00", 3}},
                 model_rows({{0.000, 0.000, 0.000, 0.000, 0.000},
                             {0.000, 0.468, 0.567, 0.648, 0.657},
                             {0.267, 0.515, 0.646, 0.661, 0.694},
                             {0.411, 0.511, 0.634, 0.660, 0.675}})});
    t.push_back({"Robustness and calibration",
                 "Model",
                 {{"Neg-Adv F1", "negadv.f1", 3},
                  {"ECE", "calib.ece", 3},
                  {"MCE", "calib.mce", 3},
                  {"Term-Intro (Term-Prec)", "term_intro", 3},
                  {"Contr-Rate", "contr_rate", 3}},
                 model_rows({{0.336, 0.508, 0.728, 0.002, 0.118},
                             {0.080, 0.155, 0.349, 0.150, 0.367},
                             {0.668, 0.683, 0.830, 0.103, 0.052},
                             {0.683, 0.671, 0.809, 0.106, 0.058}})});
    return t;
  }();
  return tables;
}

std::string render_table(const TableSpec& spec, const metrics::MetricReport& report,
                         const std::string& measured_label) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{spec.row_header};
  for (const auto& c : spec.columns) header.push_back(c.header);
  cells.push_back(header);
  for (const auto& row : spec.reference) {
    std::vector<std::string> r{row.label + " (ref)"};
    for (std::size_t i = 0; i < spec.columns.size(); ++i) {
      r.push_back(i < row.values.size() ? fmt(row.values[i], spec.columns[i].precision) : "-");
    }
    cells.push_back(r);
  }
  std::vector<std::string> measured{measured_label};
  for (const auto& c : spec.columns) {
    measured.push_back(!c.metric.empty() && report.has(c.metric) ? fmt(report.get(c.metric), c.precision) : "-");
  }
  cells.push_back(measured);

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : cells) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream out;
  out << spec.title << "\n";
  const auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i == 0) {
        out << r[i] << std::string(width[i] - r[i].size(), ' ');
      } else {
        out << "  " << std::string(width[i] - r[i].size(), ' ') << r[i];
      }
    }
    out << "\n";
  };
  std::size_t total = 0;
  for (std::size_t w : width) total += w + 2;
  line(cells[0]);
  out << std::string(total - 2, '-') << "\n";
  for (std::size_t i = 1; i + 1 < cells.size(); ++i) line(cells[i]);
  out << std::string(total - 2, '-') << "\n";
  line(cells.back());
  return out.str();
}

std::string render_all(const metrics::MetricReport& report, const std::string& measured_label) {
  std::string out;
  for (const auto& spec : standard_tables()) {
    if (!out.empty()) out += "\n";
    out += render_table(spec, report, measured_label);
  }
  return out;
}

}  // namespace neurolex::report
