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

namespace acp::analytics {

struct Mm1Spec {
  double lambda = 0.0;  // updates/s
  double mu = 1.0;      // services/s

  double rho() const { return lambda / mu; }
};

/// Time-average age of an M/M/1 FCFS update queue:
///   (1/mu) * (1 + 1/rho + rho^2 / (1 - rho)).
/// Throws kDomain unless 0 < rho < 1.
double mm1_average_age(const Mm1Spec& spec);

/// 1 / (mu - lambda). Throws kDomain unless 0 < rho < 1.
double mm1_mean_system_time(const Mm1Spec& spec);

struct OptimalRate {
  double lambda = 0.0;
  double rho = 0.0;
  double age = 0.0;
};

inline constexpr double kRhoBracket = 1e-3;

/// Golden-section search of mm1_average_age over rho in
/// (kRhoBracket, 1 - kRhoBracket) to a bracket width of `tolerance`.
OptimalRate mm1_optimal_rate(double mu, double tolerance = 1e-6);

}  // namespace acp::analytics
