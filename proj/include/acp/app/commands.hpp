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

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

#include "acp/app/config.hpp"
#include "acp/error.hpp"
#include "acp/netsim/sweep.hpp"
#include "acp/runtime.hpp"

namespace acp::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,   // bad config, overrides or input files
  kExitRuntime = 3,  // simulation or protocol failure
  kExitNetwork = 4,  // sockets, unreachable monitor
};

int exit_code(Errc code);

struct SweepOutput {
  std::vector<std::string> files;
  std::vector<std::pair<std::uint64_t, netsim::SweepResult>> sweeps;  // per seed
};

/// One open-loop sweep per seed. Writes sweep.csv (kind=sweep, one row per
/// seed and rate) and sweep_summary.csv (kind=sweep-summary, one row per
/// seed). Unstable points are reported in their row.
SweepOutput cmd_sim_sweep(const ExperimentConfig& config, std::ostream& log);

struct RunOutput {
  std::vector<std::string> files;
  std::vector<netsim::Replicate> runs;
};

/// One controlled run per seed. Writes runs.csv (kind=runs),
/// epochs_seed<N>.csv (kind=epochs) and, with trace = true,
/// trace_seed<N>.csv (kind=trace). Rethrows when every seed fails.
RunOutput cmd_sim_run(const ExperimentConfig& config, std::ostream& log);

struct LiveOutput {
  std::vector<std::string> files;
  SourceRunResult result;
  double avg_age = 0.0;      // source estimate over running-phase epochs
  double avg_backlog = 0.0;
  double rtt = 0.0;          // EWMA at exit
  double achieved_lambda = 0.0;
};

/// Live source over UDP on the wall clock. Writes runs.csv and epochs.csv.
LiveOutput cmd_source(const ExperimentConfig& config, std::ostream& log);

/// Live monitor over UDP. Writes monitor.csv (kind=monitor) on exit.
std::vector<std::string> cmd_monitor(const ExperimentConfig& config,
                                     const std::atomic<bool>* stop,
                                     std::ostream& log);

/// Time-weighted averages over epochs starting at or after `from`.
struct EpochAverages {
  double age = 0.0;
  double backlog = 0.0;
  double seconds = 0.0;
};
EpochAverages epoch_averages(const std::vector<EpochClosed>& epochs,
                             TimePoint from = kOrigin);

/// Writes the per-epoch decision trace.
void write_epochs_csv(const std::string& path, const std::vector<EpochClosed>& epochs);

}  // namespace acp::app
