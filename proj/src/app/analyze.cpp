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

#include "acp/app/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include "acp/error.hpp"

namespace acp::app {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kMetrics[] = {"age_s", "rtt_s", "backlog_pkts",
                                    "achieved_lambda_per_s"};
}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) fail(Errc::kInvalidArgument, "median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return kNaN;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<CdfPoint> ecdf(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<CdfPoint> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;  // one step per distinct value
    out.push_back({v[i], static_cast<double>(i + 1) / static_cast<double>(v.size())});
  }
  return out;
}

RunSet summarize_runs(const CsvTable& table, const std::string& label) {
  if (table.kind != "runs") {
    fail(Errc::kSchema, fmt::format("'{}' is a kind={} table, expected kind=runs",
                                    label, table.kind));
  }
  if (table.rows.empty()) {
    fail(Errc::kSchema, fmt::format("'{}' has no data rows", label));
  }
  RunSet set;
  set.label = label;
  const auto c_status = table.column("status");
  const auto c_seed = table.column("seed");
  const auto c_ctrl = table.column("controller");
  std::map<std::string, std::vector<double>> values;
  for (const auto& row : table.rows) {
    if (row[c_status] != "ok") continue;
    if (set.controller.empty()) {
      set.controller = row[c_ctrl];
    } else if (set.controller != row[c_ctrl]) {
      set.controller = "mixed";
    }
    set.seeds.push_back(static_cast<std::uint64_t>(cell_double(row[c_seed])));
    for (const char* m : kMetrics) {
      const double v = cell_double(row[table.column(m)]);
      if (!std::isnan(v)) values[m].push_back(v);
    }
    set.age.push_back(cell_double(row[table.column("age_s")]));
  }
  if (set.seeds.empty()) {
    fail(Errc::kSchema, fmt::format("'{}' has no successful runs", label));
  }
  for (const char* m : kMetrics) {
    const auto& v = values[m];
    MetricSummary s{m, kNaN, kNaN, kNaN};
    if (!v.empty()) {
      s.median = median(v);
      s.mean = mean(v);
      s.stddev = stddev(v);
    }
    set.metrics.push_back(s);
  }
  return set;
}

AnalyzeResult analyze_tables(const std::vector<CsvTable>& tables,
                             const std::vector<std::string>& labels) {
  if (tables.empty()) fail(Errc::kSchema, "analyze needs at least one table");
  AnalyzeResult res;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    res.sets.push_back(summarize_runs(tables[i], labels.at(i)));
  }
  const RunSet& a = res.sets.front();
  for (std::size_t i = 1; i < res.sets.size(); ++i) {
    const RunSet& b = res.sets[i];
    Comparison cmp;
    cmp.label_a = a.label;
    cmp.label_b = b.label;
    std::vector<double> deltas, paired_a, paired_b;
    for (std::size_t ia = 0; ia < a.seeds.size(); ++ia) {
      for (std::size_t ib = 0; ib < b.seeds.size(); ++ib) {
        if (a.seeds[ia] != b.seeds[ib]) continue;
        PairedRow r{a.seeds[ia], a.age[ia], b.age[ib], a.age[ia] - b.age[ib],
                    (a.age[ia] - b.age[ib]) / b.age[ib] * 100.0};
        deltas.push_back(r.delta);
        paired_a.push_back(r.age_a);
        paired_b.push_back(r.age_b);
        cmp.rows.push_back(r);
        break;
      }
    }
    if (deltas.empty()) {
      fail(Errc::kSchema, fmt::format("'{}' and '{}' share no seeds", a.label, b.label));
    }
    // Medians over the paired seeds only, so both sides see the same draws.
    cmp.median_delta = median(deltas);
    cmp.median_a = median(paired_a);
    cmp.median_b = median(paired_b);
    cmp.improvement_pct = (cmp.median_b - cmp.median_a) / cmp.median_b * 100.0;
    res.comparisons.push_back(std::move(cmp));
  }
  return res;
}

AnalyzeResult cmd_analyze(const std::vector<std::string>& paths,
                          const std::string& out_dir, std::ostream& log) {
  std::vector<CsvTable> tables;
  std::vector<std::string> labels;
  for (const auto& p : paths) {
    tables.push_back(read_csv(p));
    labels.push_back(p);
  }
  AnalyzeResult res = analyze_tables(tables, labels);

  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  {
    CsvWriter w((dir / "analyze_summary.csv").string(), "analyze-summary",
                {"file", "controller", "runs", "metric", "median", "mean", "stddev"});
    for (const auto& s : res.sets) {
      for (const auto& m : s.metrics) {
        w.row({s.label, s.controller, num(static_cast<std::uint64_t>(s.seeds.size())),
               m.metric, num(m.median), num(m.mean), num(m.stddev)});
      }
    }
    w.close();
  }
  {
    CsvWriter w((dir / "analyze_cdf.csv").string(), "analyze-cdf",
                {"file", "metric", "value", "fraction"});
    for (const auto& s : res.sets) {
      for (const auto& pt : ecdf(s.age)) {
        w.row({s.label, "age_s", num(pt.value), num(pt.fraction)});
      }
    }
    w.close();
  }
  if (!res.comparisons.empty()) {
    CsvWriter w((dir / "analyze_paired.csv").string(), "analyze-paired",
                {"file_a", "file_b", "seed", "age_a_s", "age_b_s", "delta_s",
                 "delta_pct"});
    for (const auto& c : res.comparisons) {
      for (const auto& r : c.rows) {
        w.row({c.label_a, c.label_b, num(r.seed), num(r.age_a), num(r.age_b),
               num(r.delta), num(r.delta_pct)});
      }
    }
    w.close();
  }

  for (const auto& s : res.sets) {
    fmt::print(log, "{} ({}, {} runs)\n", s.label, s.controller, s.seeds.size());
    for (const auto& m : s.metrics) {
      fmt::print(log, "  {:<22} median {:<12.6g} mean {:<12.6g} stddev {:.6g}\n",
                 m.metric, m.median, m.mean, m.stddev);
    }
  }
  for (const auto& c : res.comparisons) {
    fmt::print(log,
               "{} vs {}: {} paired seeds, median age {:.6g} s vs {:.6g} s, "
               "median paired delta {:.6g} s, improvement {:.2f}%\n",
               c.label_a, c.label_b, c.rows.size(), c.median_a, c.median_b,
               c.median_delta, c.improvement_pct);
  }
  return res;
}

}  // namespace acp::app
