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

#include "acp/app/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <limits>
#include <ostream>

#include "acp/app/csv.hpp"
#include "acp/udp.hpp"

namespace acp::app {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string out_path(const ExperimentConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  return (fs::path(c.output_dir) / name).string();
}

std::string status_of(const std::string& error) {
  return error.empty() ? "ok" : "failed";
}

std::vector<std::string> runs_header() {
  return {"controller", "seed", "status", "age_s", "source_age_s", "rtt_s",
          "backlog_pkts", "network_backlog_pkts", "achieved_lambda_per_s",
          "initial_lambda_per_s", "delivered_updates", "dropped_updates",
          "stall_events", "diagnostic"};
}

Duration seconds_or_max(double s) {
  return s > 0.0 ? from_seconds(s) : Duration::max();
}

}  // namespace

int exit_code(Errc code) {
  switch (code) {
    case Errc::kConfig:
    case Errc::kSchema:
      return kExitConfig;
    case Errc::kNetwork:
    case Errc::kConnectionFailed:
      return kExitNetwork;
    default:
      return kExitRuntime;
  }
}

EpochAverages epoch_averages(const std::vector<EpochClosed>& epochs, TimePoint from) {
  EpochAverages a;
  double age_area = 0.0, backlog_area = 0.0;
  for (const auto& e : epochs) {
    if (e.record.stats.epoch_start < from) continue;
    const double len = e.record.stats.length_seconds();
    age_area += e.record.stats.avg_age * len;
    backlog_area += e.record.stats.avg_backlog * len;
    a.seconds += len;
  }
  a.age = a.seconds > 0 ? age_area / a.seconds : kNaN;
  a.backlog = a.seconds > 0 ? backlog_area / a.seconds : kNaN;
  return a;
}

void write_epochs_csv(const std::string& path, const std::vector<EpochClosed>& epochs) {
  CsvWriter w(path, "epochs",
              {"epoch", "t_start_s", "t_end_s", "avg_age_s", "avg_backlog_pkts",
               "backlog_change_pkts", "age_change_s", "branch", "action", "gamma",
               "target_pkts", "lambda_per_s", "stalled"});
  std::uint64_t k = 0;
  for (const auto& e : epochs) {
    const auto& r = e.record;
    const auto& d = r.decision;
    w.row({num(++k), num(to_seconds(r.stats.epoch_start)),
           num(to_seconds(r.stats.epoch_end)), num(r.stats.avg_age),
           num(r.stats.avg_backlog), num(r.backlog_change), num(r.age_change),
           d ? std::string(to_string(d->branch)) : "",
           d ? std::string(to_string(d->action.kind)) : "",
           d ? num(d->action.gamma) : "", d ? num(d->target) : "",
           num(r.lambda), e.stalled ? "1" : "0"});
  }
  w.close();
}

SweepOutput cmd_sim_sweep(const ExperimentConfig& c, std::ostream& log) {
  SweepOutput out;
  netsim::SweepSpec spec;
  spec.topology = build_topology(c);
  spec.arrivals = build_arrivals(c);
  spec.lambdas = netsim::linear_grid(c.sweep_lo, c.sweep_hi, c.sweep_points);
  if (c.seeds.empty()) fail(Errc::kConfig, "no seeds given");

  std::vector<std::string> header{"seed", "lambda_per_s", "status", "age_s",
                                  "total_backlog_pkts", "achieved_lambda_per_s",
                                  "mean_system_time_s", "delivered_updates"};
  for (const auto& n : spec.topology.forward) header.push_back(n.name + "_backlog_pkts");
  header.push_back("diagnostic");

  const auto sweep_file = out_path(c, "sweep.csv");
  const auto summary_file = out_path(c, "sweep_summary.csv");
  CsvWriter sweep(sweep_file, "sweep", header);
  CsvWriter summary(summary_file, "sweep-summary",
                    {"seed", "argmin_lambda_per_s", "grid_argmin_lambda_per_s",
                     "min_age_s", "argmin_total_backlog_pkts", "stable_points"});
  for (auto seed : c.seeds) {
    spec.params = build_run_params(c, seed);
    spec.params.record_trace = false;
    auto res = netsim::sweep_parallel(spec, c.threads);
    std::size_t stable = 0;
    for (const auto& p : res.points) {
      std::vector<std::string> row{num(seed), num(p.lambda), p.ok ? "ok" : "unstable"};
      if (p.ok) {
        ++stable;
        for (double v : {p.age, p.total_backlog, p.achieved_lambda, p.mean_system_time}) {
          row.push_back(num(v));
        }
        row.push_back(num(p.delivered));
        for (double b : p.node_backlog) row.push_back(num(b));
      } else {
        row.resize(row.size() + 5 + spec.topology.forward.size());
      }
      row.push_back(p.error);
      sweep.row(row);
    }
    const auto& best = res.points[res.grid_argmin];
    summary.row({num(seed), num(res.argmin_lambda), num(best.lambda), num(res.min_age),
                 num(best.total_backlog), num(static_cast<std::uint64_t>(stable))});
    fmt::print(log, "seed {}: argmin lambda {:.6g}/s (grid {:.6g}/s), age {:.6g} s, "
                    "total backlog {:.4g}, {}/{} points stable\n",
               seed, res.argmin_lambda, best.lambda, res.min_age, best.total_backlog,
               stable, res.points.size());
    out.sweeps.emplace_back(seed, std::move(res));
  }
  sweep.close();
  summary.close();
  out.files = {sweep_file, summary_file};
  return out;
}

RunOutput cmd_sim_run(const ExperimentConfig& c, std::ostream& log) {
  RunOutput out;
  if (c.seeds.empty()) fail(Errc::kConfig, "no seeds given");
  netsim::ReplicateSpec spec;
  spec.topology = build_topology(c);
  const SourceConfig source = build_source_config(c);
  spec.workload = netsim::Controlled{source};
  spec.params = build_run_params(c, 0);
  if (spec.params.duration <= Duration::zero()) {
    fail(Errc::kDegenerateInterval, "duration_s must be positive");
  }
  spec.seeds = c.seeds;
  out.runs = netsim::replicate_parallel(spec, c.threads);

  const auto runs_file = out_path(c, "runs.csv");
  CsvWriter runs(runs_file, "runs",
                 runs_header());
  out.files.push_back(runs_file);
  const std::string controller(to_string(source.controller.kind));
  for (const auto& r : out.runs) {
    const auto& rep = r.report;
    if (r.ok) {
      runs.row({controller, num(r.seed), "ok", num(rep.time_avg_age),
                num(rep.source_est_age), num(rep.mean_rtt), num(rep.source_avg_backlog),
                num(rep.total_backlog), num(rep.achieved_lambda), num(rep.initial_lambda),
                num(rep.updates_delivered), num(rep.updates_dropped),
                num(rep.stall_events), ""});
      const auto ep = out_path(c, fmt::format("epochs_seed{}.csv", r.seed));
      write_epochs_csv(ep, rep.epochs);
      out.files.push_back(ep);
      if (c.trace) {
        const auto tp = out_path(c, fmt::format("trace_seed{}.csv", r.seed));
        CsvWriter t(tp, "trace", {"time_us", "node", "event", "seq"});
        for (const auto& e : rep.trace) {
          t.row({num(e.time_us), num(e.node), std::string(netsim::to_string(e.kind)),
                 num(static_cast<std::uint64_t>(e.seq))});
        }
        t.close();
        out.files.push_back(tp);
      }
      fmt::print(log, "{} seed {}: age {:.6g} s, rtt {:.6g} s, backlog {:.4g}, "
                      "lambda {:.6g}/s\n",
                 controller, r.seed, rep.time_avg_age, rep.mean_rtt,
                 rep.source_avg_backlog, rep.achieved_lambda);
    } else {
      runs.row({controller, num(r.seed), status_of(r.error), "", "", "", "", "", "",
                "", "", "", "", r.error});
      fmt::print(log, "{} seed {}: failed: {}\n", controller, r.seed, r.error);
    }
  }
  runs.close();

  bool any_ok = false;
  for (const auto& r : out.runs) any_ok = any_ok || r.ok;
  if (!any_ok) {
    // Surface the failure class of the first run.
    netsim::run(spec.topology, spec.workload, build_run_params(c, c.seeds.front()));
  }
  return out;
}

LiveOutput cmd_source(const ExperimentConfig& c, std::ostream& log) {
  LiveOutput out;
  WallClock clock;
  UdpTransport transport(clock, c.bind_host, c.bind_port);
  SourceEndpoint source(build_source_config(c, true), clock.now());
  SourceRunOptions opts;
  opts.max_updates = c.updates;
  opts.drain = from_seconds(c.drain_s);
  const std::string monitor = fmt::format("{}:{}", c.monitor_host, c.monitor_port);
  fmt::print(log, "source: {} updates to {} ({})\n", c.updates, monitor,
             to_string(source.config().controller.kind));
  out.result = run_source(source, transport, clock, monitor, opts);

  const auto avg = epoch_averages(out.result.epochs);
  out.avg_age = avg.age;
  out.avg_backlog = avg.backlog;
  out.rtt = source.rtt_ewma().value_or_empty().value_or(kNaN);
  out.achieved_lambda = avg.seconds > 0
                            ? static_cast<double>(out.result.updates_sent) / avg.seconds
                            : kNaN;

  const auto runs_file = out_path(c, "runs.csv");
  CsvWriter runs(runs_file, "runs",
                 runs_header());
  const std::uint64_t seed = c.seeds.empty() ? 0 : c.seeds.front();
  runs.row({std::string(to_string(source.config().controller.kind)), num(seed), "ok",
            num(out.avg_age), num(out.avg_age), num(out.rtt), num(out.avg_backlog), "",
            num(out.achieved_lambda), num(out.result.initial_lambda),
            num(static_cast<std::uint64_t>(out.result.accepted_ack_seqs.size())), "",
            num(out.result.stall_events), ""});
  runs.close();
  const auto epochs_file = out_path(c, "epochs.csv");
  write_epochs_csv(epochs_file, out.result.epochs);
  out.files = {runs_file, epochs_file};
  fmt::print(log, "source: sent {}, acked {}, age {:.6g} s, rtt {:.6g} s, "
                  "backlog {:.4g}, stalls {}\n",
             out.result.updates_sent, out.result.accepted_ack_seqs.size(), out.avg_age,
             out.rtt, out.avg_backlog, out.result.stall_events);
  return out;
}

std::vector<std::string> cmd_monitor(const ExperimentConfig& c,
                                     const std::atomic<bool>* stop, std::ostream& log) {
  WallClock clock;
  UdpTransport transport(clock, c.bind_host, c.monitor_port);
  Monitor monitor;
  MonitorRunOptions opts;
  opts.max_duration = seconds_or_max(c.monitor_max_s);
  opts.idle_timeout = seconds_or_max(c.monitor_idle_s);
  opts.stop = stop;
  fmt::print(log, "monitor: listening on {}:{}\n", c.bind_host, transport.local_port());
  run_monitor(monitor, transport, clock, opts);

  const auto file = out_path(c, "monitor.csv");
  CsvWriter w(file, "monitor",
              {"peer", "accepted_updates", "discarded_updates", "freshest_seq"});
  for (const auto& [peer, ep] : monitor.sources()) {
    w.row({peer, num(ep.accepted()), num(ep.discarded()),
           ep.freshest_seq() ? num(static_cast<std::uint64_t>(*ep.freshest_seq())) : ""});
  }
  w.close();
  fmt::print(log, "monitor: {} sources, {} malformed datagrams\n",
             monitor.sources().size(), monitor.malformed());
  return {file};
}

}  // namespace acp::app
