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

#include "acp/netsim/simulator.hpp"

namespace acp::netsim {

/// Open-loop age-versus-rate sweep. Every point runs with the same seed, so
/// the points share common random numbers.
struct SweepSpec {
  Topology topology;
  Arrivals arrivals = Arrivals::kPoisson;
  std::vector<double> lambdas;  // non-empty, strictly increasing
  RunParams params;
};

struct SweepPoint {
  double lambda = 0.0;
  bool ok = false;
  std::string error;  // instability or other diagnostic when !ok
  double age = 0.0;
  double total_backlog = 0.0;
  std::vector<double> node_backlog;
  double achieved_lambda = 0.0;
  double mean_system_time = 0.0;
  std::uint64_t delivered = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::size_t grid_argmin = 0;  // index of the smallest age among ok points
  double argmin_lambda = 0.0;   // refined by a local quadratic fit
  double min_age = 0.0;         // age at the grid argmin
};

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

/// Reference implementation, one point after another.
SweepResult sweep_serial(const SweepSpec& spec);

/// Same result as sweep_serial, points spread over OpenMP threads.
/// threads <= 0 uses the OpenMP default.
SweepResult sweep_parallel(const SweepSpec& spec, int threads = 0);

/// Vertex of a least-squares parabola through up to five ok points around
/// `center`. Falls back to the grid value when the fit is not convex or the
/// vertex leaves the fitted range.
double refine_argmin(const std::vector<SweepPoint>& points, std::size_t center);

struct BacklogProfile {
  double lambda = 0.0;  // refined sweep argmin
  SimReport report;     // rerun at lambda
};

/// Sweeps, then reruns at the refined argmin for `rerun_duration`.
BacklogProfile optimal_backlog_profile(const SweepSpec& spec,
                                       Duration rerun_duration,
                                       bool parallel = true);

struct ReplicateSpec {
  Topology topology;
  Workload workload;
  RunParams params;  // seed is overridden per replicate
  std::vector<std::uint64_t> seeds;
};

struct Replicate {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  SimReport report;
};

std::vector<Replicate> replicate_serial(const ReplicateSpec& spec);
std::vector<Replicate> replicate_parallel(const ReplicateSpec& spec,
                                          int threads = 0);

}  // namespace acp::netsim
