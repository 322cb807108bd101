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

#include "acp/endpoint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acp/error.hpp"

namespace acp {

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kAcp: return "acp";
    case ControllerKind::kLazy: return "lazy";
    case ControllerKind::kFixed: return "fixed";
  }
  return "?";
}

SourceEndpoint::SourceEndpoint(SourceConfig config, TimePoint origin)
    : config_(config),
      path_(origin),
      rtt_(config.ewma_alpha),
      z_(config.ewma_alpha),
      acp_(config.control),
      last_event_time_(origin),
      next_send_time_(origin),
      epoch_deadline_(origin) {
  if (config_.init.probes < 1) {
    fail(Errc::kInvalidArgument, "initialization needs at least one probe");
  }
  if (config_.controller.kind == ControllerKind::kFixed &&
      !(config_.controller.fixed_lambda > 0.0)) {
    fail(Errc::kInvalidArgument, "fixed-rate controller needs a positive rate");
  }
}

double SourceEndpoint::tau() const {
  const double rtt = rtt_.value();
  return z_.initialized() ? std::min(rtt, z_.value()) : rtt;
}

double SourceEndpoint::epoch_length() const {
  const double rtt = rtt_.value();
  const double z = z_.initialized() ? z_.value() : rtt;
  return epoch_period(rtt, z, config_.control.epoch_multiplier);
}

TimePoint SourceEndpoint::next_wakeup() const {
  switch (phase_) {
    case Phase::kInit:
      if (outstanding_probe_) {
        return outstanding_probe_->second + config_.init.probe_timeout;
      }
      return last_event_time_;
    case Phase::kRunning:
      return std::min(next_send_time_, epoch_deadline_);
    case Phase::kFailed:
      break;
  }
  return TimePoint::max();
}

std::vector<Effect> SourceEndpoint::step(TimePoint now) {
  last_event_time_ = std::max(last_event_time_, now);
  std::vector<Effect> out;
  if (phase_ == Phase::kInit) step_init(now, out);
  if (phase_ != Phase::kRunning) return out;

  // Same-instant timers: the epoch closes first so that the first send of
  // the new epoch already uses the new rate.
  if (now >= epoch_deadline_) close_epoch(now, out);
  check_stall(now, out);
  if (now >= next_send_time_) {
    const TimePoint slot = next_send_time_;
    out.emplace_back(make_update(slot, now, false));
    last_send_slot_ = slot;
    next_send_time_ = slot + period_;
  }
  return out;
}

void SourceEndpoint::step_init(TimePoint now, std::vector<Effect>& out) {
  if (outstanding_probe_ &&
      now >= outstanding_probe_->second + config_.init.probe_timeout) {
    outstanding_probe_.reset();
  }
  if (outstanding_probe_) return;
  if (probes_sent_ < config_.init.probes) {
    SendUpdate probe = make_update(now, now, true);
    outstanding_probe_ = {probe.header.seq, now};
    ++probes_sent_;
    out.emplace_back(probe);
    return;
  }
  finish_init(now);
}

void SourceEndpoint::finish_init(TimePoint now) {
  if (init_rtts_.empty()) {
    phase_ = Phase::kFailed;
    return;
  }
  const double mean_rtt =
      std::accumulate(init_rtts_.begin(), init_rtts_.end(), 0.0) /
      static_cast<double>(init_rtts_.size());
  initial_lambda_ = 1.0 / mean_rtt;

  double lambda = clamp_rate(*initial_lambda_, config_.control);
  switch (config_.controller.kind) {
    case ControllerKind::kAcp: break;
    case ControllerKind::kLazy:
      lambda = lazy_rate(rtt_.value(), config_.control);
      break;
    case ControllerKind::kFixed:
      lambda = config_.controller.fixed_lambda;
      break;
  }
  acp_.start(lambda);

  phase_ = Phase::kRunning;
  // The first control epoch starts here; the probe exchange is not scored.
  if (now > path_.epoch_start()) path_.close_epoch(now);
  set_rate(lambda, now);
  next_send_time_ = now;
  epoch_deadline_ = now + std::max(Duration{1}, from_seconds(epoch_length()));
}

void SourceEndpoint::close_epoch(TimePoint now, std::vector<Effect>& out) {
  const EpochStats stats = path_.close_epoch(now);
  EpochClosed ev;
  ev.stalled = stalled_;

  if (config_.controller.kind == ControllerKind::kAcp && !stalled_) {
    const double rtt = rtt_.value();
    const double z = z_.initialized() ? z_.value() : rtt;
    ev.record = acp_.on_epoch(stats, rtt, z);
    set_rate(ev.record.lambda, now);
  } else {
    ev.record = acp_.hold(stats);
    ev.record.lambda = lambda_;
  }
  epoch_deadline_ = now + std::max(Duration{1}, from_seconds(epoch_length()));
  out.emplace_back(ev);
}

void SourceEndpoint::check_stall(TimePoint now, std::vector<Effect>& out) {
  if (stalled_ || path_.pending().empty()) return;
  TimePoint since = path_.pending().front().send_time;
  if (last_accept_time_) since = std::max(since, *last_accept_time_);
  const Duration threshold = std::max(
      config_.stall_floor,
      from_seconds(config_.stall_epochs * epoch_length()));
  if (now - since > threshold) {
    stalled_ = true;
    ++stall_events_;
    out.emplace_back(StallDetected{since});
  }
}

SendUpdate SourceEndpoint::make_update(TimePoint stamp, TimePoint now,
                                       bool probe) {
  const Seq seq = next_seq_++;
  path_.record_send(now, seq);
  ++updates_sent_;
  SendUpdate send;
  send.header.seq = static_cast<std::uint32_t>(seq);
  send.header.gen_timestamp_us =
      static_cast<std::uint64_t>(stamp.time_since_epoch().count());
  send.header.payload_len = config_.payload_len;
  send.probe = probe;
  return send;
}

void SourceEndpoint::set_rate(double lambda, TimePoint now) {
  lambda_ = lambda;
  period_ = std::max(Duration{1}, from_seconds(1.0 / lambda));
  if (last_send_slot_) {
    next_send_time_ = std::max(now, *last_send_slot_ + period_);
  } else {
    next_send_time_ = now;
  }
}

void SourceEndpoint::on_ack(const wire::AckHeader& ack, TimePoint now) {
  last_event_time_ = std::max(last_event_time_, now);
  const AckEvent ev{ack.seq,
                    at_micros(static_cast<std::int64_t>(ack.echo_timestamp_us)),
                    now};
  const AckOutcome res = path_.record_ack(ev);
  if (res.disposition == AckDisposition::kDiscarded) {
    ++acks_discarded_;
    return;
  }
  ++acks_accepted_;
  if (res.rtt > Duration::zero()) rtt_.update(to_seconds(res.rtt));
  if (last_accept_time_ && now > *last_accept_time_) {
    z_.update(to_seconds(now - *last_accept_time_));
  }
  last_accept_time_ = now;
  stalled_ = false;

  if (phase_ == Phase::kInit) {
    if (outstanding_probe_ && ack.seq == outstanding_probe_->first) {
      init_rtts_.push_back(to_seconds(res.rtt));
      outstanding_probe_.reset();
    }
    return;
  }
  if (phase_ != Phase::kRunning || !rtt_.initialized()) return;

  // The epoch end tracks the latest estimates.
  epoch_deadline_ = std::max(
      now, path_.epoch_start() +
               std::max(Duration{1}, from_seconds(epoch_length())));
  if (config_.controller.kind == ControllerKind::kLazy) {
    set_rate(lazy_rate(rtt_.value(), config_.control), now);
  }
}

std::optional<wire::AckHeader> MonitorEndpoint::on_update(
    const wire::UpdateHeader& header, TimePoint now) {
  if (freshest_seq_ && header.seq <= *freshest_seq_) {
    ++discarded_;
    return std::nullopt;
  }
  freshest_seq_ = header.seq;
  freshest_ts_ = std::max(freshest_ts_, header.gen_timestamp_us);
  last_update_time_ = now;
  ++accepted_;
  return wire::AckHeader{header.seq, header.gen_timestamp_us};
}

std::optional<wire::Bytes> Monitor::on_datagram(
    std::span<const std::uint8_t> raw, const std::string& peer,
    TimePoint now) {
  try {
    const wire::Packet pkt = wire::decode_packet(raw);
    const auto* update = std::get_if<wire::UpdatePacket>(&pkt);
    if (update == nullptr) {
      ++malformed_;
      return std::nullopt;
    }
    if (auto ack = sources_[peer].on_update(update->header, now)) {
      return wire::encode_ack(*ack);
    }
  } catch (const Error& e) {
    if (e.code() != Errc::kMalformedPacket) throw;
    ++malformed_;
  }
  return std::nullopt;
}

}  // namespace acp
