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

#include "acp/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "acp/error.hpp"

namespace acp::app {
namespace {

// Value errors carry only the reason; the caller adds location and key.
struct BadValue {
  std::string reason;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
    throw BadValue{fmt::format("'{}' is not a number", v)};
  }
  return out;
}

template <typename T>
T to_integer(std::string_view v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw BadValue{fmt::format("'{}' is not a valid integer in range", v)};
  }
  return out;
}

double positive(std::string_view v) {
  const double d = to_double(v);
  if (!(d > 0.0)) throw BadValue{fmt::format("{} must be positive", d)};
  return d;
}

double non_negative(std::string_view v) {
  const double d = to_double(v);
  if (d < 0.0) throw BadValue{fmt::format("{} must not be negative", d)};
  return d;
}

double probability(std::string_view v) {
  const double d = to_double(v);
  if (d < 0.0 || d > 1.0) throw BadValue{fmt::format("{} is outside [0, 1]", d)};
  return d;
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw BadValue{fmt::format("'{}' is not a boolean", v)};
}

std::string one_of(std::string_view v, std::initializer_list<std::string_view> allowed) {
  for (auto a : allowed) {
    if (v == a) return std::string(v);
  }
  std::string list;
  for (auto a : allowed) list += fmt::format("{}{}", list.empty() ? "" : ", ", a);
  throw BadValue{fmt::format("'{}' is not one of {}", v, list)};
}

template <typename F>
auto to_list(std::string_view v, F&& item) {
  std::vector<decltype(item(std::string_view{}))> out;
  while (true) {
    const auto comma = v.find(',');
    const auto part = trim(v.substr(0, comma));
    if (part.empty()) throw BadValue{"empty list element"};
    out.push_back(item(part));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"topology", [](auto& c, auto v) {
         c.topology = one_of(v, {"mm1", "tandem", "net-a", "net-b", "net-c",
                                 "net-d", "net-e", "chain", "custom"});
       }},
      {"mu", [](auto& c, auto v) { c.mu = positive(v); }},
      {"mu1", [](auto& c, auto v) { c.mu1 = positive(v); }},
      {"mu2", [](auto& c, auto v) { c.mu2 = positive(v); }},
      {"link_rates_mbps", [](auto& c, auto v) { c.link_rates_mbps = to_list(v, positive); }},
      {"cross_mbps", [](auto& c, auto v) { c.cross_mbps = non_negative(v); }},
      {"update_bits", [](auto& c, auto v) {
         c.update_bits = to_integer<std::uint32_t>(v);
         if (c.update_bits == 0) throw BadValue{"must be positive"};
       }},
      {"ack_bits", [](auto& c, auto v) {
         c.ack_bits = to_integer<std::uint32_t>(v);
         if (c.ack_bits == 0) throw BadValue{"must be positive"};
       }},
      {"reverse", [](auto& c, auto v) { c.reverse = one_of(v, {"auto", "instant", "symmetric"}); }},
      {"nodes", [](auto& c, auto v) {
         const auto n = to_integer<std::size_t>(v);
         if (n == 0 || n > 64) throw BadValue{"node count must be in [1, 64]"};
         c.nodes.resize(n);
       }},
      {"arrivals", [](auto& c, auto v) { c.arrivals = one_of(v, {"poisson", "periodic"}); }},
      {"sweep_lo", [](auto& c, auto v) { c.sweep_lo = positive(v); }},
      {"sweep_hi", [](auto& c, auto v) { c.sweep_hi = positive(v); }},
      {"sweep_points", [](auto& c, auto v) {
         c.sweep_points = to_integer<std::size_t>(v);
         if (c.sweep_points == 0) throw BadValue{"must be positive"};
       }},
      {"threads", [](auto& c, auto v) { c.threads = to_integer<int>(v); }},
      {"controller", [](auto& c, auto v) { c.controller = one_of(v, {"acp", "lazy", "fixed"}); }},
      {"fixed_lambda", [](auto& c, auto v) { c.fixed_lambda = positive(v); }},
      {"kappa", [](auto& c, auto v) { c.kappa = positive(v); }},
      {"ewma_alpha", [](auto& c, auto v) {
         c.ewma_alpha = positive(v);
         if (c.ewma_alpha > 1.0) throw BadValue{"must be in (0, 1]"};
       }},
      {"epoch_multiplier", [](auto& c, auto v) {
         c.epoch_multiplier = to_integer<int>(v);
         if (c.epoch_multiplier <= 0) throw BadValue{"must be positive"};
       }},
      {"lambda_min", [](auto& c, auto v) { c.lambda_min = positive(v); }},
      {"lambda_max", [](auto& c, auto v) { c.lambda_max = positive(v); }},
      {"gamma_cap", [](auto& c, auto v) {
         c.gamma_cap = to_integer<int>(v);
         if (c.gamma_cap <= 0) throw BadValue{"must be positive"};
       }},
      {"guard", [](auto& c, auto v) { c.guard = one_of(v, {"previous-target", "previous-change"}); }},
      {"init_probes", [](auto& c, auto v) {
         c.init_probes = to_integer<int>(v);
         if (c.init_probes <= 0) throw BadValue{"must be positive"};
       }},
      {"probe_timeout_ms", [](auto& c, auto v) { c.probe_timeout_ms = non_negative(v); }},
      {"stall_epochs", [](auto& c, auto v) {
         c.stall_epochs = to_integer<int>(v);
         if (c.stall_epochs <= 0) throw BadValue{"must be positive"};
       }},
      {"stall_floor_ms", [](auto& c, auto v) { c.stall_floor_ms = non_negative(v); }},
      {"payload_bytes", [](auto& c, auto v) { c.payload_bytes = to_integer<std::uint16_t>(v); }},
      {"duration_s", [](auto& c, auto v) { c.duration_s = non_negative(v); }},
      {"warmup_fraction", [](auto& c, auto v) {
         c.warmup_fraction = probability(v);
         if (c.warmup_fraction >= 1.0) throw BadValue{"must be below 1"};
       }},
      {"seeds", [](auto& c, auto v) { c.seeds = to_list(v, to_integer<std::uint64_t>); }},
      {"backlog_bound", [](auto& c, auto v) {
         c.backlog_bound = to_integer<std::size_t>(v);
         if (c.backlog_bound == 0) throw BadValue{"must be positive"};
       }},
      {"trace", [](auto& c, auto v) { c.trace = to_bool(v); }},
      {"monitor_host", [](auto& c, auto v) { c.monitor_host = std::string(v); }},
      {"monitor_port", [](auto& c, auto v) { c.monitor_port = to_integer<std::uint16_t>(v); }},
      {"bind_host", [](auto& c, auto v) { c.bind_host = std::string(v); }},
      {"bind_port", [](auto& c, auto v) { c.bind_port = to_integer<std::uint16_t>(v); }},
      {"updates", [](auto& c, auto v) {
         c.updates = to_integer<std::uint64_t>(v);
         if (c.updates == 0) throw BadValue{"must be positive"};
       }},
      {"drain_s", [](auto& c, auto v) { c.drain_s = non_negative(v); }},
      {"monitor_idle_s", [](auto& c, auto v) { c.monitor_idle_s = non_negative(v); }},
      {"monitor_max_s", [](auto& c, auto v) { c.monitor_max_s = non_negative(v); }},
      {"output_dir", [](auto& c, auto v) { c.output_dir = std::string(v); }},
  };
  return table;
}

// node<i>.<field>, 1-based.
bool set_node_key(ExperimentConfig& c, std::string_view key, std::string_view v) {
  if (!key.starts_with("node")) return false;
  const auto dot = key.find('.');
  if (dot == std::string_view::npos || dot == 4) return false;
  std::size_t index = 0;
  const auto digits = key.substr(4, dot - 4);
  const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc{} || p != digits.data() + digits.size()) return false;
  const auto field = key.substr(dot + 1);
  if (field != "service" && field != "rate" && field != "loss" &&
      field != "propagation_ms") {
    return false;
  }
  if (index == 0 || index > 64) throw BadValue{"node index must be in [1, 64]"};
  if (c.nodes.size() < index) c.nodes.resize(index);
  auto& n = c.nodes[index - 1];
  if (field == "service") n.service = one_of(v, {"exp", "det", "link"});
  if (field == "rate") n.rate = positive(v);
  if (field == "loss") n.loss = probability(v);
  if (field == "propagation_ms") n.propagation_ms = non_negative(v);
  return true;
}

// Returns false for unknown keys.
bool set_key(ExperimentConfig& c, std::string_view key, std::string_view value) {
  for (const auto& [name, setter] : setters()) {
    if (name == key) {
      setter(c, value);
      return true;
    }
  }
  return set_node_key(c, key, value);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source_name) {
  ExperimentConfig c;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(Errc::kConfig, fmt::format("{}:{}: expected 'key = value', got '{}'",
                                      source_name, line_no, line));
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      fail(Errc::kConfig, fmt::format("{}:{}: missing key", source_name, line_no));
    }
    if (!seen.insert(std::string(key)).second) {
      fail(Errc::kConfig, fmt::format("{}:{}: duplicate key '{}'", source_name,
                                      line_no, key));
    }
    try {
      if (!set_key(c, key, value)) {
        fail(Errc::kConfig, fmt::format("{}:{}: unknown key '{}'", source_name,
                                        line_no, key));
      }
    } catch (const BadValue& e) {
      fail(Errc::kConfig, fmt::format("{}:{}: key '{}': {}", source_name,
                                      line_no, key, e.reason));
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::kConfig, fmt::format("cannot read config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    fail(Errc::kConfig,
         fmt::format("override '{}' is not of the form key=value", assignment));
  }
  const auto key = trim(assignment.substr(0, eq));
  const auto value = trim(assignment.substr(eq + 1));
  try {
    if (!set_key(config, key, value)) {
      fail(Errc::kConfig, fmt::format("override: unknown key '{}'", key));
    }
  } catch (const BadValue& e) {
    fail(Errc::kConfig, fmt::format("override: key '{}': {}", key, e.reason));
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : setters()) k.push_back(name);
    k.push_back("node<i>.service");
    k.push_back("node<i>.rate");
    k.push_back("node<i>.loss");
    k.push_back("node<i>.propagation_ms");
    return k;
  }();
  return keys;
}

namespace {

netsim::ServiceKind service_kind(const std::string& s) {
  if (s == "det") return netsim::ServiceKind::kDeterministic;
  if (s == "link") return netsim::ServiceKind::kLinkRate;
  return netsim::ServiceKind::kExponential;
}

}  // namespace

netsim::Topology build_topology(const ExperimentConfig& c) {
  using namespace netsim;
  Topology t;
  if (c.topology == "mm1") {
    t = mm1(c.mu);
  } else if (c.topology == "tandem") {
    t = tandem(c.mu1, c.mu2);
  } else if (c.topology.starts_with("net-")) {
    t = six_hop_net(c.topology.back(), c.cross_mbps);
    t.update_bits = c.update_bits;
    t.ack_bits = c.ack_bits;
  } else if (c.topology == "chain") {
    t = link_chain(c.link_rates_mbps, c.cross_mbps, c.update_bits);
    t.ack_bits = c.ack_bits;
  } else {
    if (c.nodes.empty()) {
      fail(Errc::kConfig, "custom topology needs 'nodes' or node<i>.* keys");
    }
    t.forward.resize(c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
      t.forward[i].name = fmt::format("node{}", i + 1);
      if (c.nodes[i].service.empty() || c.nodes[i].rate <= 0.0) {
        fail(Errc::kConfig,
             fmt::format("custom topology: node{} needs service and rate", i + 1));
      }
    }
    t.update_bits = c.update_bits;
    t.ack_bits = c.ack_bits;
  }
  if (c.nodes.size() > t.forward.size()) {
    fail(Errc::kConfig, fmt::format("node{} is beyond the {}-node '{}' topology",
                                    c.nodes.size(), t.forward.size(), c.topology));
  }
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& o = c.nodes[i];
    auto& n = t.forward[i];
    if (!o.service.empty()) n.service.kind = service_kind(o.service);
    if (o.rate > 0.0) n.service.rate = o.rate;
    if (o.loss >= 0.0) n.loss_prob = o.loss;
    if (o.propagation_ms >= 0.0) n.propagation = from_seconds(o.propagation_ms * 1e-3);
  }
  if (c.reverse == "instant") t.reverse_mode = ReverseMode::kInstant;
  if (c.reverse == "symmetric") t.reverse_mode = ReverseMode::kSymmetric;
  t.validate();
  return t;
}

SourceConfig build_source_config(const ExperimentConfig& c, bool live) {
  SourceConfig s;
  if (c.controller == "lazy") s.controller.kind = ControllerKind::kLazy;
  if (c.controller == "fixed") {
    s.controller.kind = ControllerKind::kFixed;
    s.controller.fixed_lambda = c.fixed_lambda;
  }
  s.control.kappa = c.kappa;
  s.control.lambda_min = c.lambda_min;
  s.control.lambda_max = c.lambda_max;
  s.control.gamma_cap = c.gamma_cap;
  s.control.epoch_multiplier = c.epoch_multiplier;
  s.control.guard = c.guard == "previous-change" ? GuardReference::kPreviousChange
                                                 : GuardReference::kPreviousTarget;
  if (!(c.lambda_min < c.lambda_max)) {
    fail(Errc::kConfig, "lambda_min must be below lambda_max");
  }
  s.ewma_alpha = c.ewma_alpha;
  s.init.probes = c.init_probes;
  double timeout_ms = c.probe_timeout_ms;
  if (timeout_ms == 0.0) {
    timeout_ms = 1000.0;
    if (!live && c.topology == "mm1") timeout_ms = 50e3 / c.mu;
    if (!live && c.topology == "tandem") timeout_ms = 50e3 / std::min(c.mu1, c.mu2);
  }
  s.init.probe_timeout = from_seconds(timeout_ms * 1e-3);
  s.stall_epochs = c.stall_epochs;
  s.stall_floor = from_seconds(c.stall_floor_ms * 1e-3);
  s.payload_len = c.payload_bytes;
  return s;
}

netsim::RunParams build_run_params(const ExperimentConfig& c, std::uint64_t seed) {
  netsim::RunParams p;
  p.duration = from_seconds(c.duration_s);
  p.warmup_fraction = c.warmup_fraction;
  p.seed = seed;
  p.backlog_bound = c.backlog_bound;
  p.record_trace = c.trace;
  return p;
}

netsim::Arrivals build_arrivals(const ExperimentConfig& c) {
  return c.arrivals == "periodic" ? netsim::Arrivals::kPeriodic
                                  : netsim::Arrivals::kPoisson;
}

}  // namespace acp::app
