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

#include "acp/runtime.hpp"

#include <thread>

#include "acp/error.hpp"

namespace acp {

WallClock::WallClock() : origin_(std::chrono::steady_clock::now()) {}

TimePoint WallClock::now() {
  return TimePoint{std::chrono::duration_cast<Duration>(
      std::chrono::steady_clock::now() - origin_)};
}

void WallClock::sleep_until(TimePoint t) {
  std::this_thread::sleep_until(origin_ + t.time_since_epoch());
}

InMemoryLink::InMemoryLink(VirtualClock& clock, Options options)
    : clock_(clock), options_(options), rng_(options.seed) {}

void InMemoryLink::send(std::span<const std::uint8_t> bytes,
                        const std::string& dest) {
  std::bernoulli_distribution fwd_drop(options_.forward_loss);
  std::bernoulli_distribution rev_drop(options_.reverse_loss);
  const TimePoint sent = clock_.now();
  if (fwd_drop(rng_)) return;
  const TimePoint at_monitor = sent + options_.one_way_delay;
  auto ack = monitor_.on_datagram(bytes, "source", at_monitor);
  if (!ack || rev_drop(rng_)) return;
  in_flight_.push_back(
      {std::move(*ack), dest, at_monitor + options_.one_way_delay});
}

std::optional<Datagram> InMemoryLink::receive(TimePoint deadline) {
  if (!in_flight_.empty() && in_flight_.front().recv_time <= deadline) {
    Datagram d = std::move(in_flight_.front());
    in_flight_.pop_front();
    clock_.sleep_until(d.recv_time);
    return d;
  }
  clock_.sleep_until(deadline);
  return std::nullopt;
}

namespace {

class Driver {
 public:
  Driver(SourceEndpoint& source, Transport& transport, Clock& clock,
         const std::string& monitor, const SourceRunOptions& options,
         SourceRunResult& result)
      : source_(source),
        transport_(transport),
        clock_(clock),
        monitor_(monitor),
        options_(options),
        result_(result),
        payload_(source.config().payload_len, 0) {}

  void dispatch(const std::vector<Effect>& effects, TimePoint now) {
    for (const Effect& e : effects) {
      if (const auto* send = std::get_if<SendUpdate>(&e)) {
        transport_.send(wire::encode_update(send->header, payload_), monitor_);
        if (!send->probe) {
          ++running_sent_;
          result_.sent.push_back(send->header);
        }
      } else if (const auto* epoch = std::get_if<EpochClosed>(&e)) {
        result_.epochs.push_back(*epoch);
      }
      if (options_.on_effect) options_.on_effect(e, now);
    }
  }

  void receive_until(TimePoint deadline) {
    auto dg = transport_.receive(deadline);
    if (!dg) return;
    try {
      const wire::Packet pkt = wire::decode_packet(dg->bytes);
      const auto* ack = std::get_if<wire::AckHeader>(&pkt);
      if (ack == nullptr) {
        ++result_.malformed;
        return;
      }
      const auto before = source_.acks_accepted();
      source_.on_ack(*ack, dg->recv_time);
      if (source_.acks_accepted() > before) {
        result_.accepted_ack_seqs.push_back(ack->seq);
      }
      if (options_.on_ack) options_.on_ack(*ack, dg->recv_time);
    } catch (const Error& e) {
      if (e.code() != Errc::kMalformedPacket) throw;
      ++result_.malformed;
    }
  }

  double init() {
    while (source_.phase() == Phase::kInit) {
      const TimePoint now = clock_.now();
      dispatch(source_.step(now), now);
      if (source_.phase() != Phase::kInit) break;
      receive_until(source_.next_wakeup());
    }
    if (source_.phase() == Phase::kFailed) {
      fail(Errc::kConnectionFailed,
           "no probe was acknowledged during initialization");
    }
    result_.initial_lambda = *source_.initial_lambda();
    return result_.initial_lambda;
  }

  void run() {
    init();
    while (running_sent_ < options_.max_updates) {
      TimePoint now = clock_.now();
      while (source_.next_wakeup() <= now &&
             running_sent_ < options_.max_updates) {
        dispatch(source_.step(now), now);
        now = clock_.now();
      }
      if (running_sent_ >= options_.max_updates) break;
      receive_until(source_.next_wakeup());
    }
    const TimePoint drain_end = clock_.now() + options_.drain;
    while (source_.sample_path().backlog() > 0 && clock_.now() < drain_end) {
      receive_until(drain_end);
    }
    result_.updates_sent = source_.updates_sent();
    result_.stall_events = source_.stall_events();
  }

 private:
  SourceEndpoint& source_;
  Transport& transport_;
  Clock& clock_;
  const std::string& monitor_;
  const SourceRunOptions& options_;
  SourceRunResult& result_;
  wire::Bytes payload_;
  std::uint64_t running_sent_ = 0;
};

}  // namespace

double source_init_phase(SourceEndpoint& source, Transport& transport,
                         Clock& clock, const std::string& monitor) {
  SourceRunOptions options;
  SourceRunResult result;
  Driver driver(source, transport, clock, monitor, options, result);
  return driver.init();
}

SourceRunResult run_source(SourceEndpoint& source, Transport& transport,
                           Clock& clock, const std::string& monitor,
                           const SourceRunOptions& options) {
  SourceRunResult result;
  Driver driver(source, transport, clock, monitor, options, result);
  driver.run();
  return result;
}

}  // namespace acp
