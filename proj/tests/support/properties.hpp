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
#include <ostream>
#include <string>
#include <vector>

#include "acp/control.hpp"

namespace acp::testing {

struct PropertyResult {
  bool ok = true;
  std::string detail;  // first counterexample, or a summary when ok
  std::uint64_t cases = 0;
};

/// Random send/ACK traces checked against an independent piecewise-linear
/// model: slope-1 growth with resets to the RTT, cumulative-ACK backlog,
/// idempotent out-of-sequence ACKs and epoch area additivity (1e-9 relative).
PropertyResult check_sample_path_properties(std::uint64_t seed, int traces);

/// EWMA stays within the range of its samples and takes the first verbatim.
PropertyResult check_ewma_convexity(std::uint64_t seed, int sequences);

/// decode(encode(x)) == x for random updates and ACKs, and random byte
/// strings decode or fail with kMalformedPacket only.
PropertyResult check_codec_roundtrip(std::uint64_t seed, int cases);

/// Monitor filter: ACKed seqs strictly increase and the freshest timestamp
/// never decreases over random permutations of an update stream.
PropertyResult check_monitor_filter(std::uint64_t seed, int permutations);

/// One row of the decision-chain table.
struct BranchCase {
  std::string name;
  ControlState before;
  double b = 0.0;
  double delta = 0.0;
  double avg_backlog = 0.0;
  // Expected outcome.
  Action action;
  Branch branch = Branch::kOtherwise;
  double target = 0.0;
  bool flag_after = false;
  int gamma_after = 0;
};

inline void PrintTo(const BranchCase& c, std::ostream* os) { *os << c.name; }

/// Twelve cases covering every sign pattern, flag and gamma state and both
/// outcomes of the guard. kappa is 0.25.
std::vector<BranchCase> branch_table();

/// Runs one case; empty string on success, otherwise what differed.
std::string run_branch_case(const BranchCase& c);

}  // namespace acp::testing
