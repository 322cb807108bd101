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
#include <deque>

#include "acp/time.hpp"

namespace acp {

using Seq = std::uint64_t;

struct SendRecord {
  Seq seq = 0;
  TimePoint send_time{};
};

struct AckEvent {
  Seq seq = 0;
  TimePoint echo_timestamp{};  // generation time copied from the update
  TimePoint recv_time{};       // arrival of the ACK at the source
};

struct EpochStats {
  double avg_age = 0.0;      // seconds
  double avg_backlog = 0.0;  // packets
  TimePoint epoch_start{};
  TimePoint epoch_end{};

  double length_seconds() const { return to_seconds(epoch_end - epoch_start); }
};

enum class AckDisposition { kAccepted, kDiscarded };

struct AckOutcome {
  AckDisposition disposition = AckDisposition::kDiscarded;
  Duration rtt{};           // valid when accepted
  std::size_t removed = 0;  // pending updates cleared by this ACK
};

/// Source-side reconstruction of the monitor's age process and of the
/// backlog of unacknowledged updates.
///
/// The age estimate starts at zero at the connection origin, grows with unit
/// slope and is reset to the round-trip time of every in-sequence ACK. The
/// backlog is the number of sent updates not yet covered by a cumulative ACK.
/// Both processes are integrated exactly in integer microseconds so that the
/// areas of consecutive epochs add up to the area of their union.
///
/// Events at the instant an epoch is closed belong to the closing epoch.
class SamplePath {
 public:
  explicit SamplePath(TimePoint origin = kOrigin);

  /// Throws kSequencing for a non-increasing seq and kTimeOrder for a send in
  /// the past.
  void record_send(TimePoint t, Seq seq);

  /// Throws kClockAnomaly when the ACK arrives before the echoed timestamp
  /// and kTimeOrder when it is older than the last recorded event.
  AckOutcome record_ack(const AckEvent& ack);

  /// Age estimate at t. Throws kTimeOrder when t precedes the last reset.
  Duration instantaneous_age(TimePoint t) const;

  /// Integrates up to t_end, returns the epoch's time averages and starts a
  /// new epoch at t_end. Throws kDegenerateInterval for t_end <= epoch start.
  EpochStats close_epoch(TimePoint t_end);

  /// Moves the integration frontier to t without any event.
  void advance(TimePoint t);

  std::size_t backlog() const noexcept { return pending_.size(); }
  const std::deque<SendRecord>& pending() const noexcept { return pending_; }
  Seq last_acked_seq() const noexcept { return last_acked_seq_; }
  Seq last_sent_seq() const noexcept { return last_sent_seq_; }
  TimePoint last_reset_time() const noexcept { return last_reset_time_; }
  Duration last_reset_age() const noexcept { return last_reset_age_; }
  TimePoint last_event_time() const noexcept { return last_event_time_; }
  TimePoint epoch_start() const noexcept { return epoch_start_; }

  /// Raw accumulators since the epoch start: twice the age area in us^2 and
  /// the backlog area in packet-us.
  __int128 age_area_x2() const noexcept { return age_area_x2_; }
  __int128 backlog_area() const noexcept { return backlog_area_; }

 private:
  void integrate_to(TimePoint t);

  std::deque<SendRecord> pending_;
  Seq last_acked_seq_ = 0;
  Seq last_sent_seq_ = 0;
  TimePoint last_reset_time_;
  Duration last_reset_age_{0};
  TimePoint last_event_time_;
  TimePoint epoch_start_;
  __int128 age_area_x2_ = 0;
  __int128 backlog_area_ = 0;
};

}  // namespace acp
