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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "acp/endpoint.hpp"
#include "acp/error.hpp"
#include "acp/runtime.hpp"
#include "acp/udp.hpp"
#include "acp/wire.hpp"
#include "support/properties.hpp"

namespace acp {
namespace {

template <typename F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no acp::Error thrown";
  return Errc::kInvalidArgument;
}

TEST(Wire, UpdateByteLayout) {
  const auto b = wire::encode_update({1, 0, 0});
  const wire::Bytes expected{0x01, 0x00, 0x00, 0x00, 0x00, 0x01, 0, 0,
                             0,    0,    0,    0,    0,    0,    0x00, 0x00};
  EXPECT_EQ(b, expected);
}

TEST(Wire, BigEndianFields) {
  const auto b = wire::encode_ack({0x01020304, 0x0A0B0C0D0E0F1011ull});
  ASSERT_EQ(b.size(), wire::kHeaderSize);
  EXPECT_EQ(b[1], 1);
  EXPECT_EQ(b[2], 0x01);
  EXPECT_EQ(b[5], 0x04);
  EXPECT_EQ(b[6], 0x0A);
  EXPECT_EQ(b[13], 0x11);
}

TEST(Wire, PayloadRoundTrip) {
  const wire::Bytes payload{9, 8, 7};
  const auto b = wire::encode_update({42, 123456789, 3}, payload);
  EXPECT_EQ(b.size(), wire::kHeaderSize + 3);
  const auto pkt = wire::decode_packet(b);
  const auto& u = std::get<wire::UpdatePacket>(pkt);
  EXPECT_EQ(u.header, (wire::UpdateHeader{42, 123456789, 3}));
  EXPECT_EQ(u.payload, payload);
}

TEST(Wire, OversizePayloadRejected) {
  const wire::Bytes big(70000, 0);
  EXPECT_EQ(error_code_of([&] { (void)wire::encode_update({1, 0, 0}, big); }),
            Errc::kEncoding);
  const wire::Bytes two(2, 0);
  EXPECT_EQ(error_code_of([&] { (void)wire::encode_update({1, 0, 3}, two); }),
            Errc::kEncoding);
}

TEST(Wire, MalformedBuffers) {
  const wire::Bytes short_buf{1, 0, 0};
  EXPECT_EQ(error_code_of([&] { (void)wire::decode_packet(short_buf); }),
            Errc::kMalformedPacket);
  auto v9 = wire::encode_update({1, 0, 0});
  v9[0] = 9;
  EXPECT_EQ(error_code_of([&] { (void)wire::decode_packet(v9); }),
            Errc::kMalformedPacket);
  auto kind = wire::encode_update({1, 0, 0});
  kind[1] = 7;
  EXPECT_EQ(error_code_of([&] { (void)wire::decode_packet(kind); }),
            Errc::kMalformedPacket);
  auto len = wire::encode_update({1, 0, 0});
  len[15] = 4;  // claims a payload that is not there
  EXPECT_EQ(error_code_of([&] { (void)wire::decode_packet(len); }),
            Errc::kMalformedPacket);
  auto ack = wire::encode_ack({1, 0});
  ack.push_back(0);
  EXPECT_EQ(error_code_of([&] { (void)wire::decode_packet(ack); }),
            Errc::kMalformedPacket);
}

TEST(Wire, CodecProperty) {
  const auto r = testing::check_codec_roundtrip(21, 20000);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Monitor, AcksInSequenceOnly) {
  MonitorEndpoint m;
  auto a = m.on_update({5, 500, 0}, at_seconds(1));
  ASSERT_TRUE(a);
  EXPECT_EQ(*a, (wire::AckHeader{5, 500}));
  EXPECT_FALSE(m.on_update({3, 300, 0}, at_seconds(2)));
  EXPECT_FALSE(m.on_update({5, 500, 0}, at_seconds(2)));
  EXPECT_EQ(m.freshest_seq(), 5u);
  EXPECT_EQ(m.freshest_timestamp_us(), 500u);
  EXPECT_EQ(m.discarded(), 2u);
  EXPECT_TRUE(m.on_update({6, 600, 0}, at_seconds(3)));
}

TEST(Monitor, DropsMalformedAndStrayAcks) {
  Monitor m;
  const wire::Bytes junk{1, 2, 3};
  EXPECT_FALSE(m.on_datagram(junk, "a", kOrigin));
  EXPECT_FALSE(m.on_datagram(wire::encode_ack({1, 0}), "a", kOrigin));
  EXPECT_EQ(m.malformed(), 2u);
  EXPECT_TRUE(m.on_datagram(wire::encode_update({1, 0, 0}), "a", kOrigin));
  EXPECT_TRUE(m.on_datagram(wire::encode_update({1, 0, 0}), "b", kOrigin));
  EXPECT_EQ(m.sources().size(), 2u);
}

TEST(Monitor, FilterProperty) {
  const auto r = testing::check_monitor_filter(17, 400);
  EXPECT_TRUE(r.ok) << r.detail;
}

// Source endpoint driven by hand.

SourceConfig fixed_config(double lambda, int probes = 1) {
  SourceConfig c;
  c.controller = {ControllerKind::kFixed, lambda};
  c.init.probes = probes;
  return c;
}

std::optional<SendUpdate> first_send(const std::vector<Effect>& effects) {
  for (const auto& e : effects) {
    if (const auto* s = std::get_if<SendUpdate>(&e)) return *s;
  }
  return std::nullopt;
}

// Runs the probe exchange with the given RTTs, one probe per RTT.
void complete_init(SourceEndpoint& s, const std::vector<double>& rtts, double& t) {
  for (double r : rtts) {
    const auto p = first_send(s.step(at_seconds(t)));
    ASSERT_TRUE(p);
    ASSERT_TRUE(p->probe);
    t += r;
    s.on_ack({p->header.seq, p->header.gen_timestamp_us}, at_seconds(t));
  }
}

TEST(Source, InitialRateFromEqualProbes) {
  SourceEndpoint s(fixed_config(20, 10));
  double t = 0;
  complete_init(s, std::vector<double>(10, 0.1), t);
  (void)s.step(at_seconds(t));
  EXPECT_EQ(s.phase(), Phase::kRunning);
  EXPECT_NEAR(*s.initial_lambda(), 10.0, 1e-9);
}

TEST(Source, InitialRateIsInverseMeanRtt) {
  SourceEndpoint s(fixed_config(20, 2));
  double t = 0;
  complete_init(s, {0.1, 0.3}, t);
  (void)s.step(at_seconds(t));
  EXPECT_NEAR(*s.initial_lambda(), 5.0, 1e-9);
}

TEST(Source, AllProbesLostFails) {
  VirtualClock clock;
  InMemoryLink::Options o;
  o.forward_loss = 1.0;
  InMemoryLink link(clock, o);
  SourceConfig c = fixed_config(20, 3);
  SourceEndpoint s(c);
  EXPECT_EQ(error_code_of([&] { (void)source_init_phase(s, link, clock, "m"); }),
            Errc::kConnectionFailed);
  EXPECT_EQ(s.phase(), Phase::kFailed);
  // Three probe timeouts of 1 s each.
  EXPECT_EQ(clock.now(), at_seconds(3));
}

TEST(Source, FixedRateSpacing) {
  SourceEndpoint s(fixed_config(20));
  double t = 0;
  complete_init(s, {0.1}, t);
  std::vector<std::uint64_t> stamps;
  for (int i = 0; i < 5; ++i) {
    const TimePoint now = s.next_wakeup();
    if (const auto u = first_send(s.step(now))) stamps.push_back(u->header.gen_timestamp_us);
  }
  ASSERT_GE(stamps.size(), 4u);
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    EXPECT_EQ(stamps[i] - stamps[i - 1], 50000u);
  }
}

TEST(Source, LateWakeKeepsScheduledStamps) {
  SourceEndpoint s(fixed_config(20));
  double t = 0;
  complete_init(s, {0.1}, t);
  const auto a = first_send(s.step(at_seconds(t)));
  ASSERT_TRUE(a);
  const auto first = a->header.gen_timestamp_us;
  // Woken 7 ms late: the stamp is still the scheduled slot.
  const auto b = first_send(s.step(at_seconds(t + 0.057)));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->header.gen_timestamp_us - first, 50000u);
}

TEST(Source, FirstAckAndInterAckGap) {
  SourceEndpoint s(fixed_config(20));
  double t = 0;
  complete_init(s, {0.1}, t);
  EXPECT_FALSE(s.z_ewma().initialized());
  EXPECT_DOUBLE_EQ(s.tau(), 0.1);
  const auto u1 = first_send(s.step(at_seconds(t)));
  const auto h1 = u1->header;
  const auto u2 = first_send(s.step(s.next_wakeup()));
  const auto h2 = u2->header;
  s.on_ack({h1.seq, h1.gen_timestamp_us}, at_seconds(t + 0.1));
  EXPECT_DOUBLE_EQ(s.z_ewma().value(), 0.1);  // gap since the probe ACK
  s.on_ack({h2.seq, h2.gen_timestamp_us}, at_seconds(t + 0.18));
  EXPECT_NEAR(s.z_ewma().value(), 0.1 * 0.875 + 0.08 * 0.125, 1e-12);
  EXPECT_EQ(s.acks_accepted(), 3u);
  // A stale ACK changes nothing.
  const double z = s.z_ewma().value();
  s.on_ack({h1.seq, h1.gen_timestamp_us}, at_seconds(t + 0.2));
  EXPECT_EQ(s.acks_discarded(), 1u);
  EXPECT_EQ(s.z_ewma().value(), z);
}

TEST(Source, EchoFromTheFutureIsAnomaly) {
  SourceEndpoint s(fixed_config(20));
  double t = 0;
  complete_init(s, {0.1}, t);
  const auto u = first_send(s.step(at_seconds(t)));
  const auto h = u->header;
  EXPECT_EQ(error_code_of([&] {
              s.on_ack({h.seq, h.gen_timestamp_us + 1'000'000}, at_seconds(t + 0.1));
            }),
            Errc::kClockAnomaly);
}

TEST(Source, StallFreezesRate) {
  SourceConfig c;
  c.init.probes = 1;
  c.stall_floor = std::chrono::milliseconds(500);
  c.stall_epochs = 1;
  SourceEndpoint s(c);
  double t = 0;
  complete_init(s, {0.1}, t);
  bool stalled = false;
  bool frozen_epoch = false;
  TimePoint now = at_seconds(t);
  while (now < at_seconds(t + 5)) {
    for (const auto& e : s.step(now)) {
      if (std::holds_alternative<StallDetected>(e)) stalled = true;
      if (const auto* ec = std::get_if<EpochClosed>(&e); ec && ec->stalled) {
        frozen_epoch = true;
        EXPECT_FALSE(ec->record.decision.has_value());
      }
    }
    now = s.next_wakeup();
  }
  EXPECT_TRUE(stalled);
  EXPECT_TRUE(frozen_epoch);
  EXPECT_EQ(s.stall_events(), 1u);
}

// Runtime over the in-memory link.

TEST(InMemory, RttIsTwiceOneWayDelay) {
  VirtualClock clock;
  InMemoryLink::Options o;
  o.one_way_delay = std::chrono::milliseconds(25);
  InMemoryLink link(clock, o);
  SourceEndpoint s(fixed_config(20, 4));
  EXPECT_NEAR(source_init_phase(s, link, clock, "m"), 20.0, 1e-9);
  EXPECT_DOUBLE_EQ(s.rtt_ewma().value(), 0.05);
}

TEST(InMemory, EpochClosesBeforeSameInstantSend) {
  VirtualClock clock;
  InMemoryLink::Options o;
  o.one_way_delay = std::chrono::milliseconds(50);
  InMemoryLink link(clock, o);
  SourceEndpoint s(fixed_config(10));
  SourceRunOptions opts;
  opts.max_updates = 50;
  std::vector<std::pair<int, TimePoint>> log;  // 0 send, 1 epoch
  opts.on_effect = [&](const Effect& e, TimePoint at) {
    if (std::holds_alternative<SendUpdate>(e)) log.emplace_back(0, at);
    if (std::holds_alternative<EpochClosed>(e)) log.emplace_back(1, at);
  };
  const auto res = run_source(s, link, clock, "m", opts);
  EXPECT_EQ(res.sent.size(), 50u);  // updates_sent also counts the probe
  int coincident = 0;
  for (std::size_t i = 1; i < log.size(); ++i) {
    if (log[i].second == log[i - 1].second && log[i].first != log[i - 1].first) {
      ++coincident;
      EXPECT_EQ(log[i - 1].first, 1) << "send before epoch close";
    }
  }
  EXPECT_GT(coincident, 0);
}

TEST(InMemory, AcpRunIsConsistent) {
  VirtualClock clock;
  InMemoryLink::Options o;
  o.one_way_delay = std::chrono::milliseconds(20);
  o.forward_loss = 0.05;
  InMemoryLink link(clock, o);
  SourceConfig c;
  SourceEndpoint s(c);
  SourceRunOptions opts;
  opts.max_updates = 2000;
  const auto res = run_source(s, link, clock, "m", opts);
  EXPECT_EQ(res.sent.size(), 2000u);
  EXPECT_FALSE(res.epochs.empty());
  for (std::size_t i = 1; i < res.accepted_ack_seqs.size(); ++i) {
    ASSERT_GT(res.accepted_ack_seqs[i], res.accepted_ack_seqs[i - 1]);
  }
  for (const auto& e : res.epochs) {
    EXPECT_GE(e.record.lambda, c.control.lambda_min);
    EXPECT_LE(e.record.lambda, c.control.lambda_max);
  }
}

TEST(Udp, LoopbackExchange) {
  WallClock clock;
  UdpTransport mon_sock(clock, "127.0.0.1", 0);
  UdpTransport src_sock(clock, "127.0.0.1", 0);
  Monitor monitor;
  std::atomic<bool> stop{false};
  std::thread th([&] {
    MonitorRunOptions mo;
    mo.stop = &stop;
    mo.max_duration = std::chrono::seconds(20);
    run_monitor(monitor, mon_sock, clock, mo);
  });
  SourceConfig c;
  c.control.lambda_min = 200;
  c.init.probe_timeout = std::chrono::milliseconds(200);
  SourceEndpoint s(c);
  SourceRunOptions opts;
  opts.max_updates = 200;
  opts.drain = std::chrono::milliseconds(200);
  SourceRunResult res;
  try {
    res = run_source(s, src_sock, clock,
                     "127.0.0.1:" + std::to_string(mon_sock.local_port()), opts);
  } catch (...) {
    stop = true;
    th.join();
    throw;
  }
  stop = true;
  th.join();
  EXPECT_EQ(res.sent.size(), 200u);
  EXPECT_GT(res.accepted_ack_seqs.size(), 150u);
  EXPECT_EQ(res.malformed, 0u);
  ASSERT_EQ(monitor.sources().size(), 1u);
}

TEST(Udp, BadPeerName) {
  WallClock clock;
  UdpTransport sock(clock, "127.0.0.1", 0);
  const wire::Bytes b{1};
  EXPECT_EQ(error_code_of([&] { sock.send(b, "nonsense"); }), Errc::kNetwork);
}

}  // namespace
}  // namespace acp
