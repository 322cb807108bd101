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

#include "acp/sample_path.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "acp/error.hpp"

namespace acp {

SamplePath::SamplePath(TimePoint origin)
    : last_reset_time_(origin),
      last_event_time_(origin),
      epoch_start_(origin) {}

void SamplePath::integrate_to(TimePoint t) {
  const std::int64_t dt = (t - last_event_time_).count();
  if (dt == 0) return;
  const std::int64_t age0 =
      last_reset_age_.count() + (last_event_time_ - last_reset_time_).count();
  // Trapezoid under a unit-slope ramp, doubled to stay integral.
  age_area_x2_ += static_cast<__int128>(2 * age0) * dt +
                  static_cast<__int128>(dt) * dt;
  backlog_area_ += static_cast<__int128>(pending_.size()) * dt;
  last_event_time_ = t;
}

void SamplePath::advance(TimePoint t) {
  if (t < last_event_time_) {
    fail(Errc::kTimeOrder,
         fmt::format("advance to {} us precedes last event at {} us",
                     t.time_since_epoch().count(),
                     last_event_time_.time_since_epoch().count()));
  }
  integrate_to(t);
}

void SamplePath::record_send(TimePoint t, Seq seq) {
  const Seq floor = std::max(last_sent_seq_, last_acked_seq_);
  if (seq <= floor) {
    fail(Errc::kSequencing,
         fmt::format("send seq {} does not exceed previous seq {}", seq,
                     floor));
  }
  advance(t);
  pending_.push_back({seq, t});
  last_sent_seq_ = seq;
}

AckOutcome SamplePath::record_ack(const AckEvent& ack) {
  if (ack.recv_time < ack.echo_timestamp) {
    fail(Errc::kClockAnomaly,
         fmt::format("ACK {} received at {} us before its echoed timestamp "
                     "{} us",
                     ack.seq, ack.recv_time.time_since_epoch().count(),
                     ack.echo_timestamp.time_since_epoch().count()));
  }
  advance(ack.recv_time);

  AckOutcome out;
  if (ack.seq <= last_acked_seq_) return out;

  out.disposition = AckDisposition::kAccepted;
  out.rtt = ack.recv_time - ack.echo_timestamp;
  last_reset_time_ = ack.recv_time;
  last_reset_age_ = out.rtt;
  while (!pending_.empty() && pending_.front().seq <= ack.seq) {
    pending_.pop_front();
    ++out.removed;
  }
  last_acked_seq_ = ack.seq;
  return out;
}

Duration SamplePath::instantaneous_age(TimePoint t) const {
  if (t < last_reset_time_) {
    fail(Errc::kTimeOrder,
         fmt::format("age queried at {} us, before the last reset at {} us",
                     t.time_since_epoch().count(),
                     last_reset_time_.time_since_epoch().count()));
  }
  return last_reset_age_ + (t - last_reset_time_);
}

EpochStats SamplePath::close_epoch(TimePoint t_end) {
  if (t_end <= epoch_start_) {
    fail(Errc::kDegenerateInterval,
         fmt::format("epoch [{} us, {} us] has no length",
                     epoch_start_.time_since_epoch().count(),
                     t_end.time_since_epoch().count()));
  }
  advance(t_end);

  const double len_us = static_cast<double>((t_end - epoch_start_).count());
  EpochStats stats;
  stats.epoch_start = epoch_start_;
  stats.epoch_end = t_end;
  stats.avg_age = static_cast<double>(age_area_x2_) / (2.0 * len_us) * 1e-6;
  stats.avg_backlog = static_cast<double>(backlog_area_) / len_us;

  age_area_x2_ = 0;
  backlog_area_ = 0;
  epoch_start_ = t_end;
  return stats;
}

}  // namespace acp
