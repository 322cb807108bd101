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
#include <string>
#include <vector>

#include "acp/time.hpp"

namespace acp::netsim {

enum class ServiceKind : std::uint8_t {
  kExponential,    // rate = mu, services/s
  kDeterministic,  // rate = mu, constant service time 1/mu
  kLinkRate,       // rate = bits/s, service time = packet bits / rate
};

struct ServiceSpec {
  ServiceKind kind = ServiceKind::kExponential;
  double rate = 1.0;
};

/// One FCFS server with an unbounded buffer. Loss applies on the outgoing
/// link after service.
struct NodeSpec {
  std::string name;
  ServiceSpec service;
  double loss_prob = 0.0;
  Duration propagation{0};
};

/// Poisson cross traffic entering at `entry` and leaving after service at
/// `exit` (forward node indices, inclusive).
struct CrossTraffic {
  std::size_t entry = 0;
  std::size_t exit = 0;
  double rate_bps = 0.0;
  std::uint32_t packet_bits = 1000;
};

enum class ReverseMode : std::uint8_t {
  kInstant,    // ACKs reach the source the moment the monitor emits them
  kSymmetric,  // ACKs cross a mirror image of the forward chain
  kCustom,     // ACKs cross `reverse`
};

struct Topology {
  std::vector<NodeSpec> forward;
  ReverseMode reverse_mode = ReverseMode::kSymmetric;
  std::vector<NodeSpec> reverse;  // kCustom only
  std::vector<CrossTraffic> cross;
  std::uint32_t update_bits = 1000;
  std::uint32_t ack_bits = 1000;

  /// Nodes an ACK traverses, resolved from the reverse mode.
  std::vector<NodeSpec> reverse_path() const;

  /// Throws kConfig on empty chains, non-positive rates, bad probabilities
  /// or cross traffic outside the chain.
  void validate() const;
};

/// Single exponential server.
Topology mm1(double mu);

/// Two exponential servers in tandem.
Topology tandem(double mu1, double mu2);

/// Chain of point-to-point links with the given rates in Mbps, optional
/// end-to-end cross traffic and a symmetric ACK path.
Topology link_chain(const std::vector<double>& rates_mbps,
                    double cross_mbps = 0.2,
                    std::uint32_t update_bits = 1000);

/// Six-hop networks "a" to "e": link rates {1,1,1,1,1,1}, {1,1,5,5,1,1},
/// {1,5,5,5,5,1}, {5,5,5,5,5,1}, {5,5,5,5,5,5} Mbps with 0.2 Mbps of cross
/// traffic entering at the first hop and crossing the whole chain. Throws
/// kConfig for other names.
Topology six_hop_net(char which, double cross_mbps = 0.2);

}  // namespace acp::netsim
