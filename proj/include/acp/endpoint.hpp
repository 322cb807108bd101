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
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "acp/control.hpp"
#include "acp/ewma.hpp"
#include "acp/sample_path.hpp"
#include "acp/time.hpp"
#include "acp/wire.hpp"

namespace acp {

enum class ControllerKind : std::uint8_t { kAcp, kLazy, kFixed };

std::string_view to_string(ControllerKind kind);

struct ControllerSpec {
  ControllerKind kind = ControllerKind::kAcp;
  double fixed_lambda = 0.0;  // kFixed only
};

struct InitParams {
  int probes = 10;
  Duration probe_timeout = std::chrono::seconds(1);
};

struct SourceConfig {
  ControllerSpec controller;
  ControlParams control;
  double ewma_alpha = Ewma::kDefaultAlpha;
  InitParams init;
  // A stall is reported after max(10 epochs, stall_floor) without an
  // accepted ACK while updates are outstanding.
  int stall_epochs = 10;
  Duration stall_floor = std::chrono::seconds(1);
  std::uint16_t payload_len = 0;
};

enum class Phase : std::uint8_t { kInit, kRunning, kFailed };

struct SendUpdate {
  wire::UpdateHeader header;
  bool probe = false;
};

struct EpochClosed {
  EpochDecision record;
  bool stalled = false;  // rate was frozen for this epoch
};

struct StallDetected {
  TimePoint since;
};

using Effect = std::variant<SendUpdate, EpochClosed, StallDetected>;

/// Source side of an ACP connection, independent of clock and transport.
///
/// The owner calls step() whenever the clock reaches next_wakeup() and
/// on_ack() for every ACK that arrives, then carries out the returned
/// effects. Update timestamps are the scheduled generation instants, so the
/// gaps between consecutive timestamps inside an epoch are exactly one send
/// period regardless of how late the owner wakes up.
class SourceEndpoint {
 public:
  explicit SourceEndpoint(SourceConfig config, TimePoint origin = kOrigin);

  std::vector<Effect> step(TimePoint now);

  /// Throws kClockAnomaly when the echoed timestamp lies in the future.
  void on_ack(const wire::AckHeader& ack, TimePoint now);

  TimePoint next_wakeup() const;

  Phase phase() const noexcept { return phase_; }
  double lambda() const noexcept { return lambda_; }
  std::optional<double> initial_lambda() const noexcept { return initial_lambda_; }
  bool stalled() const noexcept { return stalled_; }
  std::uint64_t stall_events() const noexcept { return stall_events_; }

  const SamplePath& sample_path() const noexcept { return path_; }
  const Ewma& rtt_ewma() const noexcept { return rtt_; }
  const Ewma& z_ewma() const noexcept { return z_; }
  const AcpController& controller() const noexcept { return acp_; }
  const SourceConfig& config() const noexcept { return config_; }

  /// min(RTT estimate, inter-ACK estimate); falls back to the RTT estimate
  /// until an inter-ACK gap has been seen.
  double tau() const;
  /// Current epoch length in seconds.
  double epoch_length() const;

  std::uint64_t updates_sent() const noexcept { return updates_sent_; }
  std::uint64_t acks_accepted() const noexcept { return acks_accepted_; }
  std::uint64_t acks_discarded() const noexcept { return acks_discarded_; }
  std::uint64_t probes_acked() const noexcept { return init_rtts_.size(); }
  TimePoint epoch_deadline() const noexcept { return epoch_deadline_; }
  Duration send_period() const noexcept { return period_; }

 private:
  void step_init(TimePoint now, std::vector<Effect>& out);
  void finish_init(TimePoint now);
  void close_epoch(TimePoint now, std::vector<Effect>& out);
  void check_stall(TimePoint now, std::vector<Effect>& out);
  SendUpdate make_update(TimePoint stamp, TimePoint now, bool probe);
  void set_rate(double lambda, TimePoint now);

  SourceConfig config_;
  Phase phase_ = Phase::kInit;
  SamplePath path_;
  Ewma rtt_;
  Ewma z_;
  AcpController acp_;

  Seq next_seq_ = 1;
  std::uint64_t updates_sent_ = 0;
  std::uint64_t acks_accepted_ = 0;
  std::uint64_t acks_discarded_ = 0;
  std::optional<TimePoint> last_accept_time_;
  TimePoint last_event_time_;

  // Initialization phase.
  int probes_sent_ = 0;
  std::optional<std::pair<Seq, TimePoint>> outstanding_probe_;
  std::vector<double> init_rtts_;
  std::optional<double> initial_lambda_;

  // Running phase.
  double lambda_ = 0.0;
  Duration period_{0};
  TimePoint next_send_time_;
  std::optional<TimePoint> last_send_slot_;
  TimePoint epoch_deadline_;
  bool stalled_ = false;
  std::uint64_t stall_events_ = 0;
};

/// Monitor state for one source: keeps the freshest update and ACKs only
/// in-sequence arrivals.
class MonitorEndpoint {
 public:
  std::optional<wire::AckHeader> on_update(const wire::UpdateHeader& header,
                                           TimePoint now);

  std::optional<std::uint32_t> freshest_seq() const noexcept { return freshest_seq_; }
  std::uint64_t freshest_timestamp_us() const noexcept { return freshest_ts_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  std::uint64_t discarded() const noexcept { return discarded_; }
  TimePoint last_update_time() const noexcept { return last_update_time_; }

 private:
  std::optional<std::uint32_t> freshest_seq_;
  std::uint64_t freshest_ts_ = 0;
  std::uint64_t accepted_ = 0;
  std::uint64_t discarded_ = 0;
  TimePoint last_update_time_;
};

/// Monitor serving any number of sources, keyed by remote address.
class Monitor {
 public:
  /// Returns the encoded ACK to send back, if any. Malformed datagrams and
  /// stray ACKs are counted and dropped.
  std::optional<wire::Bytes> on_datagram(std::span<const std::uint8_t> raw,
                                         const std::string& peer,
                                         TimePoint now);

  const std::map<std::string, MonitorEndpoint>& sources() const noexcept {
    return sources_;
  }
  std::uint64_t malformed() const noexcept { return malformed_; }

 private:
  std::map<std::string, MonitorEndpoint> sources_;
  std::uint64_t malformed_ = 0;
};

}  // namespace acp
