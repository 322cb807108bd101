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

#include "acp/netsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "acp/error.hpp"

namespace acp::netsim {

std::vector<NodeSpec> Topology::reverse_path() const {
  switch (reverse_mode) {
    case ReverseMode::kInstant: return {};
    case ReverseMode::kCustom: return reverse;
    case ReverseMode::kSymmetric: {
      std::vector<NodeSpec> mirror(forward.rbegin(), forward.rend());
      for (auto& n : mirror) n.name += "-rev";
      return mirror;
    }
  }
  return {};
}

namespace {

void check_node(const NodeSpec& n, std::string_view where) {
  if (!(n.service.rate > 0.0) || !std::isfinite(n.service.rate)) {
    fail(Errc::kConfig, fmt::format("{} node '{}' needs a positive service "
                                    "rate, got {}",
                                    where, n.name, n.service.rate));
  }
  if (!(n.loss_prob >= 0.0 && n.loss_prob <= 1.0)) {
    fail(Errc::kConfig, fmt::format("{} node '{}' loss probability {} is "
                                    "outside [0, 1]",
                                    where, n.name, n.loss_prob));
  }
  if (n.propagation < Duration::zero()) {
    fail(Errc::kConfig,
         fmt::format("{} node '{}' has negative propagation delay", where,
                     n.name));
  }
}

}  // namespace

void Topology::validate() const {
  if (forward.empty()) fail(Errc::kConfig, "forward path has no nodes");
  for (const auto& n : forward) check_node(n, "forward");
  if (reverse_mode == ReverseMode::kCustom && reverse.empty()) {
    fail(Errc::kConfig, "custom reverse path has no nodes");
  }
  for (const auto& n : reverse_path()) check_node(n, "reverse");
  for (const auto& c : cross) {
    if (c.entry > c.exit || c.exit >= forward.size()) {
      fail(Errc::kConfig,
           fmt::format("cross traffic [{}, {}] does not fit a {}-node chain",
                       c.entry, c.exit, forward.size()));
    }
    if (!(c.rate_bps > 0.0) || c.packet_bits == 0) {
      fail(Errc::kConfig, "cross traffic needs a positive rate and size");
    }
  }
  if (update_bits == 0 || ack_bits == 0) {
    fail(Errc::kConfig, "packet sizes must be positive");
  }
}

Topology mm1(double mu) {
  Topology t;
  t.forward.push_back({"q1", {ServiceKind::kExponential, mu}});
  t.reverse_mode = ReverseMode::kInstant;
  return t;
}

Topology tandem(double mu1, double mu2) {
  Topology t;
  t.forward.push_back({"q1", {ServiceKind::kExponential, mu1}});
  t.forward.push_back({"q2", {ServiceKind::kExponential, mu2}});
  t.reverse_mode = ReverseMode::kInstant;
  return t;
}

Topology link_chain(const std::vector<double>& rates_mbps, double cross_mbps,
                    std::uint32_t update_bits) {
  Topology t;
  for (std::size_t i = 0; i < rates_mbps.size(); ++i) {
    t.forward.push_back({fmt::format("hop{}", i + 1),
                         {ServiceKind::kLinkRate, rates_mbps[i] * 1e6}});
  }
  t.reverse_mode = ReverseMode::kSymmetric;
  t.update_bits = update_bits;
  t.ack_bits = update_bits;
  // One flow from the source side to the last hop, so every link carries it.
  if (cross_mbps > 0.0 && !rates_mbps.empty()) {
    t.cross.push_back({0, rates_mbps.size() - 1, cross_mbps * 1e6, 1000});
  }
  return t;
}

Topology six_hop_net(char which, double cross_mbps) {
  switch (which) {
    case 'a': case 'A': return link_chain({1, 1, 1, 1, 1, 1}, cross_mbps);
    case 'b': case 'B': return link_chain({1, 1, 5, 5, 1, 1}, cross_mbps);
    case 'c': case 'C': return link_chain({1, 5, 5, 5, 5, 1}, cross_mbps);
    case 'd': case 'D': return link_chain({5, 5, 5, 5, 5, 1}, cross_mbps);
    case 'e': case 'E': return link_chain({5, 5, 5, 5, 5, 5}, cross_mbps);
    default: break;
  }
  fail(Errc::kConfig, fmt::format("unknown six-hop network '{}'", which));
}

}  // namespace acp::netsim
