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

#include "acp/netsim/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fmt/format.h>
#include <limits>

#include "acp/error.hpp"
#include "acp/netsim/rng.hpp"

namespace acp::netsim {

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::kGenerate: return "generate";
    case TraceKind::kArrive: return "arrive";
    case TraceKind::kDepart: return "depart";
    case TraceKind::kDrop: return "drop";
    case TraceKind::kDeliver: return "deliver";
    case TraceKind::kDiscard: return "discard";
    case TraceKind::kAck: return "ack";
  }
  return "?";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream ids; node streams are offset by the global node index.
constexpr std::uint64_t kArrivalStream = 1;
constexpr std::uint64_t kServiceStreamBase = 1000;
constexpr std::uint64_t kLossStreamBase = 2000;
constexpr std::uint64_t kCrossStreamBase = 3000;

enum class PacketKind : std::uint8_t { kUpdate, kAck, kCross };

struct Packet {
  PacketKind kind = PacketKind::kCross;
  std::uint32_t seq = 0;
  std::int64_t gen_us = 0;
  std::uint32_t bits = 0;
  std::uint32_t exit_node = 0;
  std::int64_t node_arrival_us = 0;
  std::array<std::uint8_t, wire::kHeaderSize> header{};
};

enum class EvKind : std::uint8_t {
  kGenerate, kCross, kArrive, kDepart, kSourceWake, kAckAtSource
};

struct Event {
  std::int64_t time = 0;
  std::uint64_t order = 0;
  EvKind kind = EvKind::kGenerate;
  std::uint32_t index = 0;
  std::uint64_t token = 0;
  Packet pkt;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return a.time != b.time ? a.time > b.time : a.order > b.order;
  }
};

struct Node {
  NodeSpec spec;
  RandomStream service_rng;
  RandomStream loss_rng;
  std::deque<Packet> queue;  // front is in service
  std::uint64_t updates_present = 0;
  __int128 backlog_area = 0;  // update-packet us in the window
  std::int64_t last_change = 0;
  std::uint64_t departures = 0;
  double sojourn_sum = 0.0;
};

std::int64_t to_us(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds * 1e6));
}

template <std::size_t N>
std::array<std::uint8_t, N> to_array(const wire::Bytes& b) {
  std::array<std::uint8_t, N> out{};
  std::copy_n(b.begin(), std::min(N, b.size()), out.begin());
  return out;
}

class Engine {
 public:
  Engine(const Topology& topology, const Workload& workload,
         const RunParams& params)
      : topology_(topology),
        workload_(workload),
        params_(params),
        end_(params.duration.count()),
        warm_(static_cast<std::int64_t>(
            std::llround(params.warmup_fraction *
                         static_cast<double>(params.duration.count())))),
        arrival_rng_(params.seed, kArrivalStream) {
    topology_.validate();
    if (params.duration <= Duration::zero()) {
      fail(Errc::kDegenerateInterval, "simulation duration must be positive");
    }
    if (!(params.warmup_fraction >= 0.0 && params.warmup_fraction < 1.0)) {
      fail(Errc::kConfig, fmt::format("warmup fraction {} is outside [0, 1)",
                                      params.warmup_fraction));
    }
    forward_count_ = static_cast<std::uint32_t>(topology_.forward.size());
    auto reverse = topology_.reverse_path();
    std::uint32_t g = 0;
    for (const auto& spec : topology_.forward) add_node(spec, g++);
    for (const auto& spec : reverse) add_node(spec, g++);
    if (const auto* open = std::get_if<OpenLoop>(&workload_)) {
      if (!(open->lambda > 0.0)) {
        fail(Errc::kInvalidArgument,
             fmt::format("update rate must be positive, got {}", open->lambda));
      }
    } else {
      source_.emplace(std::get<Controlled>(workload_).source);
    }
  }

  SimReport run() {
    start();
    while (!heap_.empty() && heap_.front().time <= end_) {
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      Event ev = std::move(heap_.back());
      heap_.pop_back();
      now_ = ev.time;
      dispatch(ev);
    }
    now_ = end_;
    return finish();
  }

 private:
  void add_node(const NodeSpec& spec, std::uint32_t g) {
    nodes_.push_back(Node{spec, RandomStream(params_.seed, kServiceStreamBase + g),
                          RandomStream(params_.seed, kLossStreamBase + g), {}});
  }

  void schedule(std::int64_t t, EvKind kind, std::uint32_t index = 0,
                Packet pkt = {}, std::uint64_t token = 0) {
    heap_.push_back(Event{t, next_order_++, kind, index, token, pkt});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
  }

  void trace(int node, TraceKind kind, std::uint32_t seq) {
    if (params_.record_trace) report_.trace.push_back({now_, node, kind, seq});
  }

  bool in_window() const { return now_ >= warm_; }

  void start() {
    if (const auto* open = std::get_if<OpenLoop>(&workload_)) {
      next_arrival_s_ = to_seconds(open->phase);
      if (open->arrivals == Arrivals::kPoisson) {
        next_arrival_s_ += arrival_rng_.exponential(open->lambda);
      }
      schedule(to_us(next_arrival_s_), EvKind::kGenerate);
    } else {
      schedule(0, EvKind::kSourceWake, 0, {}, ++wake_token_);
    }
    for (std::uint32_t j = 0; j < topology_.cross.size(); ++j) {
      cross_rng_.emplace_back(params_.seed, kCrossStreamBase + j);
      cross_next_s_.push_back(0.0);
      schedule_cross(j);
    }
  }

  void schedule_cross(std::uint32_t j) {
    const auto& flow = topology_.cross[j];
    cross_next_s_[j] += cross_rng_[j].exponential(flow.rate_bps / flow.packet_bits);
    schedule(to_us(cross_next_s_[j]), EvKind::kCross, j);
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EvKind::kGenerate: generate_open_loop(); break;
      case EvKind::kCross: {
        const auto& flow = topology_.cross[ev.index];
        Packet p;
        p.kind = PacketKind::kCross;
        p.bits = flow.packet_bits;
        p.exit_node = static_cast<std::uint32_t>(flow.exit);
        arrive(static_cast<std::uint32_t>(flow.entry), p);
        schedule_cross(ev.index);
        break;
      }
      case EvKind::kArrive: arrive_or_deliver(ev.index, ev.pkt); break;
      case EvKind::kDepart: depart(ev.index); break;
      case EvKind::kSourceWake:
        if (ev.token == wake_token_) source_wake();
        break;
      case EvKind::kAckAtSource: ack_at_source(ev.pkt); break;
    }
  }

  void generate_open_loop() {
    const auto& open = std::get<OpenLoop>(workload_);
    Packet p;
    p.kind = PacketKind::kUpdate;
    p.seq = ++open_seq_;
    p.gen_us = now_;
    p.bits = topology_.update_bits;
    p.exit_node = forward_count_ - 1;
    ++report_.updates_generated;
    if (in_window()) ++sent_in_window_;
    trace(-1, TraceKind::kGenerate, p.seq);
    arrive(0, p);

    if (open.arrivals == Arrivals::kPoisson) {
      next_arrival_s_ += arrival_rng_.exponential(open.lambda);
    } else {
      ++periodic_index_;
      next_arrival_s_ = to_seconds(open.phase) +
                        static_cast<double>(periodic_index_) / open.lambda;
    }
    schedule(std::max(now_, to_us(next_arrival_s_)),
             EvKind::kGenerate);
  }

  void touch_backlog(Node& n) {
    const std::int64_t from = std::max(n.last_change, warm_);
    if (now_ > from) {
      n.backlog_area += static_cast<__int128>(n.updates_present) * (now_ - from);
    }
    n.last_change = now_;
  }

  std::int64_t service_time(Node& n, const Packet& p) {
    switch (n.spec.service.kind) {
      case ServiceKind::kExponential:
        return to_us(n.service_rng.exponential(n.spec.service.rate));
      case ServiceKind::kDeterministic:
        return to_us(1.0 / n.spec.service.rate);
      case ServiceKind::kLinkRate:
        return to_us(static_cast<double>(p.bits) / n.spec.service.rate);
    }
    return 0;
  }

  void arrive(std::uint32_t g, Packet p) {
    Node& n = nodes_[g];
    p.node_arrival_us = now_;
    if (p.kind == PacketKind::kUpdate) {
      touch_backlog(n);
      ++n.updates_present;
    }
    if (p.kind != PacketKind::kCross) {
      trace(static_cast<int>(g), TraceKind::kArrive, p.seq);
    }
    n.queue.push_back(p);
    if (n.queue.size() > params_.backlog_bound) {
      fail(Errc::kInstability,
           fmt::format("node '{}' holds {} packets at t={} s, above the "
                       "bound of {}",
                       n.spec.name, n.queue.size(), now_ * 1e-6,
                       params_.backlog_bound));
    }
    if (n.queue.size() == 1) {
      schedule(now_ + service_time(n, n.queue.front()), EvKind::kDepart, g);
    }
  }

  void depart(std::uint32_t g) {
    Node& n = nodes_[g];
    Packet p = n.queue.front();
    n.queue.pop_front();
    if (!n.queue.empty()) {
      schedule(now_ + service_time(n, n.queue.front()), EvKind::kDepart, g);
    }
    if (p.kind == PacketKind::kUpdate) {
      touch_backlog(n);
      --n.updates_present;
      if (in_window()) {
        ++n.departures;
        n.sojourn_sum += (now_ - p.node_arrival_us) * 1e-6;
      }
    }
    if (p.kind != PacketKind::kCross) {
      trace(static_cast<int>(g), TraceKind::kDepart, p.seq);
    }

    if (n.loss_rng.bernoulli(n.spec.loss_prob)) {
      if (p.kind == PacketKind::kUpdate) {
        ++report_.updates_dropped;
        trace(static_cast<int>(g), TraceKind::kDrop, p.seq);
      }
      return;
    }
    const std::int64_t at = now_ + n.spec.propagation.count();
    if (g == p.exit_node) {
      if (p.kind == PacketKind::kCross) return;
      if (at != now_) {
        schedule(at, p.kind == PacketKind::kUpdate ? EvKind::kArrive
                                                   : EvKind::kAckAtSource,
                 kDeliverIndex, p);
        return;
      }
      if (p.kind == PacketKind::kUpdate) {
        deliver(p);
      } else {
        ack_at_source(p);
      }
      return;
    }
    if (at != now_) {
      schedule(at, EvKind::kArrive, g + 1, p);
    } else {
      arrive(g + 1, p);
    }
  }

  void integrate_age() {
    const std::int64_t from = std::max(last_age_t_, warm_);
    if (now_ > from) {
      const __int128 a1 = now_ - freshest_gen_;
      const __int128 a0 = from - freshest_gen_;
      age_area_x2_ += a1 * a1 - a0 * a0;
    }
    last_age_t_ = now_;
  }

  void deliver(const Packet& p) {
    ++report_.updates_delivered;
    const bool counted = in_window();
    if (counted) {
      ++report_.delivered_in_window;
      system_time_sum_ += (now_ - p.gen_us) * 1e-6;
    }

    std::optional<wire::AckHeader> ack;
    bool fresh = false;
    if (source_) {
      const auto pkt = wire::decode_packet(p.header);
      const auto& update = std::get<wire::UpdatePacket>(pkt);
      ack = monitor_.on_update(update.header, at_micros(now_));
      fresh = ack.has_value();
    } else {
      fresh = p.seq > open_freshest_seq_;
      if (fresh) open_freshest_seq_ = p.seq;
    }
    if (!fresh) {
      trace(-2, TraceKind::kDiscard, p.seq);
      return;
    }
    trace(-2, TraceKind::kDeliver, p.seq);
    integrate_age();
    freshest_gen_ = std::max(freshest_gen_, p.gen_us);

    if (!ack) return;
    Packet a;
    a.kind = PacketKind::kAck;
    a.seq = ack->seq;
    a.gen_us = p.gen_us;
    a.bits = topology_.ack_bits;
    a.exit_node = static_cast<std::uint32_t>(nodes_.size() - 1);
    a.header = to_array<wire::kHeaderSize>(wire::encode_ack(*ack));
    if (nodes_.size() == forward_count_) {
      schedule(now_, EvKind::kAckAtSource, 0, a);
    } else {
      arrive(forward_count_, a);
    }
  }

  void ack_at_source(const Packet& p) {
    if (!source_ || source_->phase() == Phase::kFailed) return;
    const auto pkt = wire::decode_packet(p.header);
    const auto& ack = std::get<wire::AckHeader>(pkt);
    trace(-1, TraceKind::kAck, ack.seq);
    const auto before = source_->acks_accepted();
    source_->on_ack(ack, at_micros(now_));
    report_.source_events.push_back({at_micros(now_), ack});
    if (source_->acks_accepted() > before && in_window()) {
      rtt_sum_ += (now_ - static_cast<std::int64_t>(ack.echo_timestamp_us)) * 1e-6;
      ++rtt_count_;
    }
    reschedule_source();
  }

  void source_wake() {
    const auto effects = source_->step(at_micros(now_));
    report_.source_events.push_back({at_micros(now_), std::nullopt});
    for (const Effect& e : effects) {
      if (const auto* send = std::get_if<SendUpdate>(&e)) {
        emit_update(*send);
      } else if (const auto* epoch = std::get_if<EpochClosed>(&e)) {
        report_.epochs.push_back(*epoch);
      }
    }
    if (source_->phase() == Phase::kFailed) {
      fail(Errc::kConnectionFailed,
           "no probe was acknowledged during initialization");
    }
    reschedule_source();
  }

  void emit_update(const SendUpdate& send) {
    Packet p;
    p.kind = PacketKind::kUpdate;
    p.seq = send.header.seq;
    p.gen_us = static_cast<std::int64_t>(send.header.gen_timestamp_us);
    p.bits = topology_.update_bits;
    p.exit_node = forward_count_ - 1;
    wire::UpdateHeader h = send.header;
    h.payload_len = 0;
    p.header = to_array<wire::kHeaderSize>(wire::encode_update(h));
    ++report_.updates_generated;
    if (!send.probe && in_window()) ++sent_in_window_;
    trace(-1, TraceKind::kGenerate, p.seq);
    arrive(0, p);
  }

  void reschedule_source() {
    const TimePoint t = source_->next_wakeup();
    if (t == TimePoint::max()) return;
    schedule(std::max(now_, t.time_since_epoch().count()), EvKind::kSourceWake,
             0, {}, ++wake_token_);
  }

  NodeStats node_stats(Node& n, double window) {
    touch_backlog(n);
    NodeStats s;
    s.name = n.spec.name;
    s.avg_backlog = static_cast<double>(n.backlog_area) * 1e-6 / window;
    s.throughput = static_cast<double>(n.departures) / window;
    s.mean_sojourn = n.departures ? n.sojourn_sum / n.departures : kNaN;
    s.departures = n.departures;
    return s;
  }

  SimReport finish() {
    if (source_ && source_->phase() != Phase::kRunning) {
      fail(Errc::kConnectionFailed,
           "source initialization did not complete within the run");
    }
    const double window = (end_ - warm_) * 1e-6;
    integrate_age();
    report_.time_avg_age = static_cast<double>(age_area_x2_) * 1e-12 / (2.0 * window);
    for (std::uint32_t g = 0; g < nodes_.size(); ++g) {
      NodeStats s = node_stats(nodes_[g], window);
      if (g < forward_count_) {
        report_.total_backlog += s.avg_backlog;
        report_.forward.push_back(std::move(s));
      } else {
        report_.reverse.push_back(std::move(s));
      }
    }
    report_.mean_system_time = report_.delivered_in_window
                                   ? system_time_sum_ / report_.delivered_in_window
                                   : kNaN;
    report_.achieved_lambda = static_cast<double>(sent_in_window_) / window;

    std::uint64_t in_flight = 0;
    for (std::uint32_t g = 0; g < forward_count_; ++g) {
      in_flight += nodes_[g].updates_present;
    }
    for (const Event& ev : heap_) {
      if (ev.kind == EvKind::kArrive && ev.pkt.kind == PacketKind::kUpdate) {
        ++in_flight;
      }
    }
    report_.updates_in_flight = in_flight;

    if (source_) {
      report_.mean_rtt = rtt_count_ ? rtt_sum_ / rtt_count_ : kNaN;
      report_.stall_events = source_->stall_events();
      report_.initial_lambda = source_->initial_lambda().value_or(kNaN);
      double age_area = 0.0, backlog_area = 0.0, len = 0.0;
      for (const auto& e : report_.epochs) {
        if (e.record.stats.epoch_start < at_micros(warm_)) continue;
        const double l = e.record.stats.length_seconds();
        age_area += e.record.stats.avg_age * l;
        backlog_area += e.record.stats.avg_backlog * l;
        len += l;
      }
      report_.source_est_age = len > 0 ? age_area / len : kNaN;
      report_.source_avg_backlog = len > 0 ? backlog_area / len : kNaN;
    } else {
      report_.mean_rtt = kNaN;
      report_.source_est_age = kNaN;
      report_.source_avg_backlog = kNaN;
      report_.initial_lambda = kNaN;
    }
    return std::move(report_);
  }

  // Packets arriving with this index are delivered to the monitor.
  static constexpr std::uint32_t kDeliverIndex = std::numeric_limits<std::uint32_t>::max();

  void arrive_or_deliver(std::uint32_t index, const Packet& p) {
    if (index == kDeliverIndex) {
      deliver(p);
    } else {
      arrive(index, p);
    }
  }

  Topology topology_;
  Workload workload_;
  RunParams params_;
  std::int64_t end_;
  std::int64_t warm_;
  std::int64_t now_ = 0;

  std::vector<Event> heap_;
  std::uint64_t next_order_ = 0;
  std::vector<Node> nodes_;
  std::uint32_t forward_count_ = 0;

  RandomStream arrival_rng_;
  double next_arrival_s_ = 0.0;
  std::uint64_t periodic_index_ = 0;
  std::uint32_t open_seq_ = 0;
  std::uint32_t open_freshest_seq_ = 0;
  std::vector<RandomStream> cross_rng_;
  std::vector<double> cross_next_s_;

  std::optional<SourceEndpoint> source_;
  MonitorEndpoint monitor_;
  std::uint64_t wake_token_ = 0;

  std::int64_t freshest_gen_ = 0;
  std::int64_t last_age_t_ = 0;
  __int128 age_area_x2_ = 0;
  double system_time_sum_ = 0.0;
  double rtt_sum_ = 0.0;
  std::uint64_t rtt_count_ = 0;
  std::uint64_t sent_in_window_ = 0;

  SimReport report_;
};

}  // namespace

SimReport run(const Topology& topology, const Workload& workload,
              const RunParams& params) {
  Engine engine(topology, workload, params);
  return engine.run();
}

std::vector<EpochClosed> replay_source(
    const SourceConfig& config,
    const std::vector<SimReport::SourceEvent>& events) {
  SourceEndpoint source(config);
  std::vector<EpochClosed> out;
  for (const auto& ev : events) {
    if (ev.ack) {
      source.on_ack(*ev.ack, ev.time);
      continue;
    }
    for (const Effect& e : source.step(ev.time)) {
      if (const auto* epoch = std::get_if<EpochClosed>(&e)) out.push_back(*epoch);
    }
  }
  return out;
}

}  // namespace acp::netsim
