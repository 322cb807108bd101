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
#include <string_view>
#include <vector>

#include "acp/endpoint.hpp"
#include "acp/netsim/simulator.hpp"
#include "acp/netsim/topology.hpp"

namespace acp::app {

/// Per-node override for presets, or the node list of a custom topology.
struct NodeOverride {
  std::string service;  // "exp", "det", "link"; empty keeps the preset
  double rate = 0.0;    // 0 keeps the preset
  double loss = -1.0;   // negative keeps the preset
  double propagation_ms = -1.0;
};

/// Every setting of every subcommand. Defaults are the documented values;
/// see README for the key list.
struct ExperimentConfig {
  // Topology.
  std::string topology = "mm1";  // mm1 | tandem | net-a..net-e | chain | custom
  double mu = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  std::vector<double> link_rates_mbps{1, 1, 1, 1, 1, 1};
  double cross_mbps = 0.2;
  std::uint32_t update_bits = 1000;
  std::uint32_t ack_bits = 1000;
  std::string reverse = "auto";  // auto | instant | symmetric
  std::vector<NodeOverride> nodes;  // node1.* is index 0

  // Open-loop sweep.
  std::string arrivals = "poisson";  // poisson | periodic
  double sweep_lo = 0.05;
  double sweep_hi = 0.95;
  std::size_t sweep_points = 19;
  int threads = 0;

  // Controller.
  std::string controller = "acp";  // acp | lazy | fixed
  double fixed_lambda = 1.0;
  double kappa = 0.25;
  double ewma_alpha = 0.125;
  int epoch_multiplier = 10;
  double lambda_min = 0.1;
  double lambda_max = 1e4;
  int gamma_cap = 30;
  std::string guard = "previous-target";  // previous-target | previous-change
  int init_probes = 10;
  // 0 picks 50 mean service times of the slowest node for mm1 and tandem
  // and 1000 ms otherwise.
  double probe_timeout_ms = 0.0;
  int stall_epochs = 10;
  double stall_floor_ms = 1000.0;
  std::uint16_t payload_bytes = 0;

  // Simulation.
  double duration_s = 10000.0;
  double warmup_fraction = 0.1;
  std::vector<std::uint64_t> seeds{1};
  std::size_t backlog_bound = 100000;
  bool trace = false;

  // Live runs.
  std::string monitor_host = "127.0.0.1";
  std::uint16_t monitor_port = 9999;
  std::string bind_host = "0.0.0.0";
  std::uint16_t bind_port = 0;
  std::uint64_t updates = 1000;
  double drain_s = 1.0;
  double monitor_idle_s = 0.0;  // 0 runs until interrupted
  double monitor_max_s = 0.0;   // 0 means no limit

  std::string output_dir = ".";
};

/// Parses `key = value` lines. '#' starts a comment. Throws kConfig naming
/// the source, line and key for unknown keys, duplicates and bad values.
ExperimentConfig parse_config(std::string_view text,
                              std::string_view source_name = "<config>");

/// Reads and parses a file. Throws kConfig when it cannot be read.
ExperimentConfig load_config(const std::string& path);

/// Applies one `key=value` override on top of an existing configuration.
void apply_override(ExperimentConfig& config, std::string_view assignment);

/// All recognised keys in documentation order.
const std::vector<std::string>& config_keys();

netsim::Topology build_topology(const ExperimentConfig& config);
/// A zero probe_timeout_ms scales with the service time of the unit-rate
/// models in simulation and is 1 s on a live path.
SourceConfig build_source_config(const ExperimentConfig& config, bool live = false);
netsim::RunParams build_run_params(const ExperimentConfig& config,
                                   std::uint64_t seed);
netsim::Arrivals build_arrivals(const ExperimentConfig& config);

}  // namespace acp::app
