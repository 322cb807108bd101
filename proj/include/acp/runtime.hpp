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
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "acp/endpoint.hpp"
#include "acp/time.hpp"
#include "acp/wire.hpp"

namespace acp {

struct Datagram {
  wire::Bytes bytes;
  std::string peer;
  TimePoint recv_time{};
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(std::span<const std::uint8_t> bytes,
                    const std::string& dest) = 0;
  /// Blocks until a datagram arrives or the clock reaches `deadline`.
  virtual std::optional<Datagram> receive(TimePoint deadline) = 0;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimePoint now() = 0;
  virtual void sleep_until(TimePoint t) = 0;
};

/// Clock that only moves when told to.
class VirtualClock final : public Clock {
 public:
  TimePoint now() override { return now_; }
  void sleep_until(TimePoint t) override { now_ = std::max(now_, t); }

 private:
  TimePoint now_ = kOrigin;
};

/// Wall clock measured from construction on the steady clock.
class WallClock final : public Clock {
 public:
  WallClock();
  TimePoint now() override;
  void sleep_until(TimePoint t) override;

 private:
  std::chrono::steady_clock::time_point origin_;
};

/// In-memory datagram path to a monitor with a fixed one-way delay and
/// optional Bernoulli loss in each direction. Delivery to the monitor and the
/// returning ACK are both computed at send time, so the link needs no thread.
class InMemoryLink final : public Transport {
 public:
  struct Options {
    Duration one_way_delay{1000};
    double forward_loss = 0.0;
    double reverse_loss = 0.0;
    std::uint64_t seed = 1;
  };

  InMemoryLink(VirtualClock& clock, Options options);

  void send(std::span<const std::uint8_t> bytes,
            const std::string& dest) override;
  std::optional<Datagram> receive(TimePoint deadline) override;

  const Monitor& monitor() const noexcept { return monitor_; }

 private:
  VirtualClock& clock_;
  Options options_;
  std::mt19937_64 rng_;
  Monitor monitor_;
  std::deque<Datagram> in_flight_;  // ordered by recv_time
};

struct SourceRunOptions {
  std::uint64_t max_updates = 1000;  // running-phase updates, probes excluded
  Duration drain = std::chrono::seconds(1);
  std::function<void(const Effect&, TimePoint)> on_effect;
  std::function<void(const wire::AckHeader&, TimePoint)> on_ack;
};

struct SourceRunResult {
  double initial_lambda = 0.0;
  std::uint64_t updates_sent = 0;
  std::uint64_t stall_events = 0;
  std::uint64_t malformed = 0;
  std::vector<EpochClosed> epochs;
  std::vector<wire::UpdateHeader> sent;  // running-phase updates in order
  std::vector<std::uint32_t> accepted_ack_seqs;
};

/// Runs the probe exchange to completion and returns the initial rate.
/// Throws kConnectionFailed when no probe is acknowledged.
double source_init_phase(SourceEndpoint& source, Transport& transport,
                         Clock& clock, const std::string& monitor);

/// Initialization followed by the running phase until `max_updates` updates
/// have been sent and outstanding ACKs have drained.
SourceRunResult run_source(SourceEndpoint& source, Transport& transport,
                           Clock& clock, const std::string& monitor,
                           const SourceRunOptions& options = {});

}  // namespace acp
