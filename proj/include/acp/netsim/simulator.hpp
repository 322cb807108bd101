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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "acp/endpoint.hpp"
#include "acp/netsim/topology.hpp"

namespace acp::netsim {

enum class Arrivals : std::uint8_t { kPoisson, kPeriodic };

/// Updates generated without feedback; no ACKs are exchanged.
struct OpenLoop {
  Arrivals arrivals = Arrivals::kPoisson;
  double lambda = 0.5;
  Duration phase{0};  // first periodic arrival
};

/// Updates generated by a source endpoint that reacts to ACKs.
struct Controlled {
  SourceConfig source;
};

using Workload = std::variant<OpenLoop, Controlled>;

struct RunParams {
  Duration duration = std::chrono::seconds(10000);
  double warmup_fraction = 0.1;
  std::uint64_t seed = 1;
  std::size_t backlog_bound = 100000;
  bool record_trace = false;
};

enum class TraceKind : std::uint8_t {
  kGenerate, kArrive, kDepart, kDrop, kDeliver, kDiscard, kAck
};

std::string_view to_string(TraceKind kind);

struct TraceRecord {
  std::int64_t time_us = 0;
  int node = -1;  // -1 source, -2 monitor; reverse nodes follow forward ones
  TraceKind kind = TraceKind::kGenerate;
  std::uint32_t seq = 0;
};

struct NodeStats {
  std::string name;
  double avg_backlog = 0.0;   // update packets present, time average
  double throughput = 0.0;    // update departures/s
  double mean_sojourn = 0.0;  // s, updates departing in the window
  std::uint64_t departures = 0;
};

/// Statistics over the window after warmup.
struct SimReport {
  double time_avg_age = 0.0;    // monitor side, shared clock
  double source_est_age = 0.0;  // source reconstruction; NaN for open loop
  double source_avg_backlog = 0.0;  // NaN for open loop
  double total_backlog = 0.0;   // sum of forward-node averages
  std::vector<NodeStats> forward;
  std::vector<NodeStats> reverse;
  double mean_rtt = 0.0;          // NaN for open loop
  double mean_system_time = 0.0;  // generation to monitor delivery
  double achieved_lambda = 0.0;
  std::uint64_t updates_generated = 0;  // whole run, probes included
  std::uint64_t updates_delivered = 0;
  std::uint64_t updates_dropped = 0;
  std::uint64_t updates_in_flight = 0;
  std::uint64_t delivered_in_window = 0;
  std::uint64_t stall_events = 0;
  double initial_lambda = 0.0;
  std::vector<EpochClosed> epochs;
  std::vector<TraceRecord> trace;
  /// Source-side events in order, for replaying the controller.
  struct SourceEvent {
    TimePoint time;
    std::optional<wire::AckHeader> ack;  // empty for a timer wakeup
  };
  std::vector<SourceEvent> source_events;
};

/// Runs one simulation. Deterministic in (topology, workload, params).
/// Throws kInstability when any node holds more than params.backlog_bound
/// packets and kConfig/kInvalidArgument for invalid inputs.
SimReport run(const Topology& topology, const Workload& workload,
              const RunParams& params);

/// Replays recorded source events into a fresh endpoint and returns the
/// epoch records it produces.
std::vector<EpochClosed> replay_source(const SourceConfig& config,
                                       const std::vector<SimReport::SourceEvent>& events);

}  // namespace acp::netsim
