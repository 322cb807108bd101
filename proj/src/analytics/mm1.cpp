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

#include "acp/analytics.hpp"

#include <cmath>
#include <fmt/format.h>

#include "acp/error.hpp"

namespace acp::analytics {

namespace {

void check_domain(const Mm1Spec& spec) {
  if (!(spec.mu > 0.0) || !(spec.lambda > 0.0) || !(spec.rho() < 1.0)) {
    fail(Errc::kDomain,
         fmt::format("M/M/1 formulas need 0 < rho < 1 (lambda={}, mu={})",
                     spec.lambda, spec.mu));
  }
}

}  // namespace

double mm1_average_age(const Mm1Spec& spec) {
  check_domain(spec);
  const double rho = spec.rho();
  return (1.0 + 1.0 / rho + rho * rho / (1.0 - rho)) / spec.mu;
}

double mm1_mean_system_time(const Mm1Spec& spec) {
  check_domain(spec);
  return 1.0 / (spec.mu - spec.lambda);
}

OptimalRate mm1_optimal_rate(double mu, double tolerance) {
  if (!(mu > 0.0)) {
    fail(Errc::kDomain, fmt::format("service rate must be positive, got {}", mu));
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto age_at = [mu](double rho) {
    return mm1_average_age({rho * mu, mu});
  };

  double lo = kRhoBracket;
  double hi = 1.0 - kRhoBracket;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = age_at(x1);
  double f2 = age_at(x2);
  while (hi - lo > tolerance) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = age_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = age_at(x2);
    }
  }
  const double rho = 0.5 * (lo + hi);
  return {rho * mu, rho, age_at(rho)};
}

}  // namespace acp::analytics
