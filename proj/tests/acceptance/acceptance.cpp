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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Arguments select criteria by number.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "acp/analytics.hpp"
#include "acp/app/analyze.hpp"
#include "acp/app/commands.hpp"
#include "acp/app/config.hpp"
#include "acp/error.hpp"
#include "acp/netsim/simulator.hpp"
#include "acp/netsim/sweep.hpp"
#include "acp/udp.hpp"
#include "support/properties.hpp"

namespace {

using namespace acp;
using namespace acp::netsim;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

RunParams run_params(double seconds, std::uint64_t seed = 1) {
  RunParams p;
  p.duration = from_seconds(seconds);
  p.seed = seed;
  return p;
}

Controlled controlled(ControllerKind kind, Duration probe_timeout = std::chrono::seconds(1)) {
  Controlled c;
  c.source.controller.kind = kind;
  c.source.init.probe_timeout = probe_timeout;
  return c;
}

// Coarse sweep, then a finer one around the coarse argmin, then a long
// rerun at the refined argmin.
struct Optimum {
  double lambda = 0.0;
  double min_age = 0.0;  // fine-grid minimum
  SimReport report;      // rerun at lambda
};

Optimum find_optimum(const Topology& t, Arrivals arrivals, double lo, double hi,
                     double sweep_seconds, double rerun_seconds) {
  SweepSpec coarse{t, arrivals, linear_grid(lo, hi, 19), run_params(sweep_seconds)};
  const auto c = sweep_parallel(coarse);
  const double step = (hi - lo) / 18;
  const double center = c.points[c.grid_argmin].lambda;
  SweepSpec fine = coarse;
  fine.lambdas = linear_grid(std::max(lo / 2, center - 2 * step), center + 2 * step, 11);
  const auto f = sweep_parallel(fine);
  Optimum o;
  o.lambda = f.argmin_lambda;
  o.min_age = f.min_age;
  o.report = run(t, OpenLoop{arrivals, o.lambda}, run_params(rerun_seconds));
  return o;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// 1
Verdict branch_table() {
  int ok = 0;
  std::string bad;
  const auto cases = acp::testing::branch_table();
  for (const auto& c : cases) {
    const auto diff = acp::testing::run_branch_case(c);
    if (diff.empty()) {
      ++ok;
    } else if (bad.empty()) {
      bad = fmt::format("; first mismatch {}: {}", c.name, diff);
    }
  }
  const bool pass = cases.size() == 12 && ok == 12;
  return {pass, fmt::format("{}/{} cases match{}", ok, cases.size(), bad)};
}

// 2
Verdict mm1_oracle() {
  SweepSpec s{mm1(1.0), Arrivals::kPoisson, {0.3, 0.5, 0.7}, run_params(4e6)};
  const auto res = sweep_parallel(s);
  bool pass = true;
  std::string d;
  for (const auto& p : res.points) {
    const double ref = analytics::mm1_average_age({p.lambda, 1.0});
    const double err = (p.age - ref) / ref;
    pass = pass && p.ok && std::abs(err) <= 0.02 && p.delivered >= 1'000'000;
    d += fmt::format("rho={} age={:.4f} ref={:.4f} err={:+.2f}% n={}; ", p.lambda, p.age, ref,
                     100 * err, p.delivered);
  }
  return {pass, d};
}

// 3
Verdict bowl() {
  SweepSpec s{mm1(1.0), Arrivals::kPoisson, linear_grid(0.05, 0.95, 19), run_params(1e6)};
  const auto res = sweep_parallel(s);
  const auto oracle = analytics::mm1_optimal_rate(1.0);
  const bool interior = res.grid_argmin > 0 && res.grid_argmin + 1 < res.points.size();
  const double rho = res.argmin_lambda;
  return {interior && rho >= 0.48 && rho <= 0.58,
          fmt::format("argmin rho={:.4f} (grid {:.2f}), min age={:.4f}; oracle rho*={:.4f} "
                      "age*={:.4f}",
                      rho, res.points[res.grid_argmin].lambda, res.min_age, oracle.rho,
                      oracle.age)};
}

// 4
Verdict tandem_backlog() {
  struct Case {
    const char* name;
    Topology t;
    double target, tol;
  };
  const Case cases[] = {{"tandem(1,1)", tandem(1, 1), 1.6, 0.15},
                        {"tandem(1,5)", tandem(1, 5), 1.43, 0.15},
                        {"mm1", mm1(1), 1.2, 0.1}};
  bool pass = true;
  std::string d;
  for (const auto& c : cases) {
    const auto o = find_optimum(c.t, Arrivals::kPoisson, 0.05, 0.95, 2e5, 1e6);
    const double backlog = o.report.total_backlog;
    const double per_system_time = o.report.achieved_lambda * o.report.mean_system_time;
    const bool ok = within(backlog, c.target, c.tol);
    pass = pass && ok;
    d += fmt::format("{} {}: lambda*={:.4f} backlog={:.3f} lambda*T={:.3f} want {}+-{}; ",
                     ok ? "ok" : "MISS", c.name, o.lambda, backlog, per_system_time, c.target,
                     c.tol);
  }
  return {pass, d};
}

// 5
Verdict bottleneck_profile() {
  const auto t = six_hop_net('b');
  const auto o = find_optimum(t, Arrivals::kPeriodic, 40, 760, 200, 1000);
  bool pass = true;
  double slow_min = 1e9;
  std::string d = fmt::format("lambda*={:.1f}/s:", o.lambda);
  for (std::size_t i = 0; i < t.forward.size(); ++i) {
    const bool slow = t.forward[i].service.rate < 2e6;
    const double b = o.report.forward[i].avg_backlog;
    if (slow) {
      pass = pass && within(b, 0.8, 0.15);
      slow_min = std::min(slow_min, b);
    }
    d += fmt::format(" {}{}={:.3f}", t.forward[i].name, slow ? "(1M)" : "(5M)", b);
  }
  for (std::size_t i = 0; i < t.forward.size(); ++i) {
    if (t.forward[i].service.rate >= 2e6) {
      pass = pass && o.report.forward[i].avg_backlog < slow_min;
    }
  }
  return {pass, d};
}

// 6
Verdict lazy_backlog() {
  struct Case {
    const char* name;
    Topology t;
    double seconds;
    Duration timeout;
  };
  const Case cases[] = {{"mm1", mm1(1), 1e5, std::chrono::seconds(50)},
                        {"tandem(1,1)", tandem(1, 1), 1e5, std::chrono::seconds(50)},
                        {"tandem(1,5)", tandem(1, 5), 1e5, std::chrono::seconds(50)},
                        {"net-a", six_hop_net('a'), 500, std::chrono::seconds(1)},
                        {"net-b", six_hop_net('b'), 500, std::chrono::seconds(1)},
                        {"net-e", six_hop_net('e'), 500, std::chrono::seconds(1)}};
  bool pass = true;
  std::string d;
  for (const auto& c : cases) {
    const auto r = run(c.t, controlled(ControllerKind::kLazy, c.timeout), run_params(c.seconds));
    const bool ok = within(r.source_avg_backlog, 1.0, 0.2);
    pass = pass && ok;
    d += fmt::format("{}={:.3f}; ", c.name, r.source_avg_backlog);
  }
  return {pass, d + "(updates sent and not yet acknowledged)"};
}

// 7
Verdict acp_vs_lazy() {
  std::vector<std::uint64_t> seeds(10);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i + 1;
  bool pass = true;
  std::string d;
  for (char net : {'a', 'e'}) {
    double med[2];
    int idx = 0;
    for (auto kind : {ControllerKind::kAcp, ControllerKind::kLazy}) {
      ReplicateSpec s{six_hop_net(net), controlled(kind), run_params(500), seeds};
      std::vector<double> ages;
      for (const auto& r : replicate_parallel(s)) {
        if (r.ok) ages.push_back(r.report.time_avg_age);
      }
      med[idx++] = ages.size() == seeds.size() ? acp::app::median(ages) : std::nan("");
    }
    const bool ok = med[0] <= med[1];
    pass = pass && ok;
    d += fmt::format("net-{}: ACP median {:.3f} ms, Lazy {:.3f} ms, improvement {:+.1f}%; ", net,
                     1e3 * med[0], 1e3 * med[1], 100 * (med[1] - med[0]) / med[1]);
  }
  return {pass, d};
}

// 8
Verdict near_optimal() {
  struct Case {
    const char* name;
    Topology t;
  };
  const Case cases[] = {{"mm1", mm1(1)}, {"tandem(1,1)", tandem(1, 1)}};
  bool pass = true;
  std::string d;
  for (const auto& c : cases) {
    const auto o = find_optimum(c.t, Arrivals::kPoisson, 0.05, 0.95, 2e5, 1e5);
    const auto r = run(c.t, controlled(ControllerKind::kAcp, std::chrono::seconds(50)),
                       run_params(2e5));
    const double ratio = r.time_avg_age / o.min_age;
    const bool ok = ratio <= 1.25;
    pass = pass && ok;
    d += fmt::format("{}: ACP age {:.3f} at {:.3f}/s, sweep optimum {:.3f} at {:.3f}/s, "
                     "ratio {:.3f}; ",
                     c.name, r.time_avg_age, r.achieved_lambda, o.min_age, o.lambda, ratio);
  }
  return {pass, d};
}

// 9
Verdict properties() {
  const testing::PropertyResult rs[] = {
      testing::check_sample_path_properties(101, 2000),
      testing::check_ewma_convexity(102, 2000),
      testing::check_monitor_filter(103, 500),
  };
  bool pass = true;
  std::string d;
  for (const auto& r : rs) {
    pass = pass && r.ok;
    d += r.detail + "; ";
  }
  return {pass, d};
}

// 10
Verdict wire_loopback() {
  const auto codec = testing::check_codec_roundtrip(104, 100000);

  WallClock clock;
  UdpTransport mon_sock(clock, "127.0.0.1", 0);
  UdpTransport src_sock(clock, "127.0.0.1", 0);
  Monitor monitor;
  std::atomic<bool> stop{false};
  std::thread th([&] {
    MonitorRunOptions mo;
    mo.stop = &stop;
    mo.max_duration = std::chrono::seconds(120);
    run_monitor(monitor, mon_sock, clock, mo);
  });

  SourceConfig c;
  c.control.kappa = 1.0;
  c.control.lambda_min = 100;
  c.control.lambda_max = 2000;
  SourceEndpoint source(c);
  SourceRunOptions opts;
  opts.max_updates = 1000;
  opts.drain = std::chrono::milliseconds(500);
  std::vector<TimePoint> boundaries;
  std::vector<TimePoint> send_times;
  opts.on_effect = [&](const Effect& e, TimePoint at) {
    if (std::holds_alternative<EpochClosed>(e)) boundaries.push_back(at);
    if (const auto* s = std::get_if<SendUpdate>(&e); s && !s->probe) send_times.push_back(at);
  };
  SourceRunResult res;
  std::string error;
  try {
    res = run_source(source, src_sock, clock,
                     fmt::format("127.0.0.1:{}", mon_sock.local_port()), opts);
  } catch (const std::exception& e) {
    error = e.what();
  }
  stop = true;
  th.join();
  if (!error.empty()) return {false, "loopback run failed: " + error};

  bool increasing = true;
  for (std::size_t i = 1; i < res.accepted_ack_seqs.size(); ++i) {
    increasing = increasing && res.accepted_ack_seqs[i] > res.accepted_ack_seqs[i - 1];
  }
  // Consecutive stamp gaps inside one epoch must all equal the first.
  const auto epoch_of = [&](TimePoint t) {
    return std::upper_bound(boundaries.begin(), boundaries.end(), t) - boundaries.begin();
  };
  std::size_t pairs = 0, off = 0;
  double worst_lag = 0.0;
  std::int64_t epoch_gap = -1;
  for (std::size_t i = 1; i < res.sent.size(); ++i) {
    if (epoch_of(send_times[i]) != epoch_of(send_times[i - 1])) {
      epoch_gap = -1;
      continue;
    }
    const auto gap = static_cast<std::int64_t>(res.sent[i].gen_timestamp_us -
                                               res.sent[i - 1].gen_timestamp_us);
    ++pairs;
    if (epoch_gap < 0) epoch_gap = gap;
    if (std::abs(gap - epoch_gap) > 1) ++off;
    // How late the wall clock actually woke up for this slot.
    const double lag = to_seconds(send_times[i]) - res.sent[i].gen_timestamp_us * 1e-6;
    worst_lag = std::max(worst_lag, lag);
  }
  const bool pass = codec.ok && res.sent.size() == 1000 && res.stall_events == 0 && increasing &&
                    pairs > 0 && off == 0 && res.malformed == 0;
  return {pass,
          fmt::format("codec: {}; sent={} acked={} stalls={} increasing={} epochs={} "
                      "in-epoch gap pairs={} off-period={} worst wakeup lag={:.2f} ms",
                      codec.detail, res.sent.size(), res.accepted_ack_seqs.size(),
                      res.stall_events, increasing, res.epochs.size(), pairs, off,
                      1e3 * worst_lag)};
}

// 11
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "acp_acceptance_determinism";
  fs::remove_all(root);
  std::ostringstream log;
  auto configure = [&](const std::string& topo, const std::string& controller, int rep) {
    app::ExperimentConfig c;
    c.topology = topo;
    c.controller = controller;
    c.duration_s = topo.starts_with("net") ? 100 : 5000;
    c.sweep_lo = topo.starts_with("net") ? 100 : 0.05;
    c.sweep_hi = topo.starts_with("net") ? 700 : 0.95;
    c.sweep_points = 7;
    c.seeds = {3, 4};
    c.trace = true;
    c.output_dir = (root / fmt::format("{}-{}-{}", topo, controller, rep)).string();
    return c;
  };
  std::size_t files = 0, differ = 0;
  std::string first_diff;
  auto compare = [&](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) {
      ++differ;
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      ++files;
      if (slurp(a[i]) != slurp(b[i])) {
        ++differ;
        if (first_diff.empty()) first_diff = a[i];
      }
    }
  };
  for (const char* topo : {"tandem", "net-b"}) {
    compare(app::cmd_sim_sweep(configure(topo, "acp", 1), log).files,
            app::cmd_sim_sweep(configure(topo, "acp", 2), log).files);
    for (const char* ctl : {"acp", "lazy"}) {
      compare(app::cmd_sim_run(configure(topo, ctl, 1), log).files,
              app::cmd_sim_run(configure(topo, ctl, 2), log).files);
    }
  }
  fs::remove_all(root);
  return {files > 0 && differ == 0,
          fmt::format("{} CSV files compared, {} differ{}", files, differ,
                      first_diff.empty() ? "" : " (first: " + first_diff + ")")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"branch-table", branch_table},     {"mm1-oracle", mm1_oracle},
      {"bowl-argmin", bowl},              {"tandem-optimal-backlog", tandem_backlog},
      {"bottleneck-profile", bottleneck_profile}, {"lazy-backlog", lazy_backlog},
      {"acp-vs-lazy", acp_vs_lazy},       {"near-optimal", near_optimal},
      {"property-suite", properties},     {"wire-loopback", wire_loopback},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(n)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    fmt::print("{} {:2} {}: {} [{:.1f} s]\n", v.pass ? "PASS" : "FAIL", n, criteria[i].first,
               v.detail, secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
