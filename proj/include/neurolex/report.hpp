#pragma once

#include <string>
#include <vector>

#include "neurolex/metrics.hpp"

namespace neurolex::report {

struct Column {
  std::string header;
  std::string metric;  // key in MetricReport; empty for reference-only columns
  int precision = 3;
};

struct ReferenceRow {
  std::string label;
  std::vector<double> values;  // one per column
};

struct TableSpec {
  std::string title;
  std::string row_header;
  std::vector<Column> columns;
  std::vector<ReferenceRow> reference;  // published values, reference only
};

// The six result layouts: tokenizer, intrinsic, IE, summarization, data
// efficiency, robustness.
const std::vector<TableSpec>& standard_tables();

// Aligned plain-text table: reference rows, then one "measured" row taken
// from the report ("-" where the metric was not computed).
std::string render_table(const TableSpec& spec, const metrics::MetricReport& report,
                         const std::string& measured_label = "measured");
std::string render_all(const metrics::MetricReport& report,
                       const std::string& measured_label = "measured");

}  // namespace neurolex::report
