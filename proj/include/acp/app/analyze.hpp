/*
 * Copyright (c) 2026 The acp-aoi Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at:
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "acp/app/csv.hpp"

namespace acp::app {

/// Median of a non-empty sample (mean of the middle pair for even sizes).
double median(std::vector<double> v);
double mean(const std::vector<double>& v);
/// Sample standard deviation; NaN below two values.
double stddev(const std::vector<double>& v);

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;  // P(X <= value)
};
/// Empirical CDF, one point per sample in ascending order.
std::vector<CdfPoint> ecdf(std::vector<double> v);

struct MetricSummary {
  std::string metric;  // column name in the runs table
  double median = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct RunSet {
  std::string label;  // file name
  std::string controller;
  std::vector<std::uint64_t> seeds;  // ok runs only
  std::vector<double> age;           // seconds, aligned with seeds
  std::vector<MetricSummary> metrics;
};

struct PairedRow {
  std::uint64_t seed = 0;
  double age_a = 0.0;
  double age_b = 0.0;
  double delta = 0.0;      // age_a - age_b, seconds
  double delta_pct = 0.0;  // relative to age_b
};

struct Comparison {
  std::string label_a;
  std::string label_b;
  std::vector<PairedRow> rows;  // seeds present in both sets; never empty
  double median_delta = 0.0;     // median of per-seed deltas
  double median_a = 0.0;
  double median_b = 0.0;
  double improvement_pct = 0.0;  // (median_b - median_a) / median_b * 100
};

struct AnalyzeResult {
  std::vector<RunSet> sets;
  std::vector<Comparison> comparisons;  // first set against each other set
};

/// Summarises runs tables. Throws kSchema for tables of another kind or
/// without data rows.
RunSet summarize_runs(const CsvTable& table, const std::string& label);
AnalyzeResult analyze_tables(const std::vector<CsvTable>& tables,
                             const std::vector<std::string>& labels);

/// Reads the files, writes analyze_summary.csv, analyze_cdf.csv and, for two
/// or more inputs, analyze_paired.csv into `out_dir`, and prints a table.
AnalyzeResult cmd_analyze(const std::vector<std::string>& paths,
                          const std::string& out_dir, std::ostream& log);

}  // namespace acp::app
