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

#include "acp/netsim/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "acp/error.hpp"

namespace acp::netsim {

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

namespace {

void check_spec(const SweepSpec& spec) {
  if (spec.lambdas.empty()) fail(Errc::kInvalidArgument, "sweep has no rates");
  for (std::size_t i = 0; i < spec.lambdas.size(); ++i) {
    if (!(spec.lambdas[i] > 0.0)) {
      fail(Errc::kInvalidArgument,
           fmt::format("sweep rate {} is not positive", spec.lambdas[i]));
    }
    if (i > 0 && !(spec.lambdas[i] > spec.lambdas[i - 1])) {
      fail(Errc::kInvalidArgument, "sweep rates must be strictly increasing");
    }
  }
  spec.topology.validate();
}

// Runs one point; failures are kept in the point rather than thrown.
SweepPoint run_point(const SweepSpec& spec, double lambda) {
  SweepPoint pt;
  pt.lambda = lambda;
  try {
    const SimReport r =
        run(spec.topology, OpenLoop{spec.arrivals, lambda, Duration{0}}, spec.params);
    pt.ok = true;
    pt.age = r.time_avg_age;
    pt.total_backlog = r.total_backlog;
    for (const auto& n : r.forward) pt.node_backlog.push_back(n.avg_backlog);
    pt.achieved_lambda = r.achieved_lambda;
    pt.mean_system_time = r.mean_system_time;
    pt.delivered = r.delivered_in_window;
  } catch (const std::exception& e) {
    pt.error = e.what();
  }
  return pt;
}

SweepResult summarize(std::vector<SweepPoint> points) {
  SweepResult res;
  res.points = std::move(points);
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    const auto& p = res.points[i];
    if (p.ok && p.age < best) {
      best = p.age;
      res.grid_argmin = i;
      any = true;
    }
  }
  if (!any) fail(Errc::kInstability, "no sweep point produced a stable run");
  res.min_age = best;
  res.argmin_lambda = refine_argmin(res.points, res.grid_argmin);
  return res;
}

}  // namespace

double refine_argmin(const std::vector<SweepPoint>& points, std::size_t center) {
  const double fallback = points.at(center).lambda;
  std::vector<std::pair<double, double>> xy;
  const std::size_t lo = center >= 2 ? center - 2 : 0;
  const std::size_t hi = std::min(points.size(), center + 3);
  for (std::size_t i = lo; i < hi; ++i) {
    if (points[i].ok) xy.emplace_back(points[i].lambda, points[i].age);
  }
  if (xy.size() < 3) return fallback;

  // Normal equations for y = a + b x + c x^2, centred on the grid argmin.
  std::array<double, 5> s{};  // sums of x^0..x^4
  std::array<double, 3> t{};  // sums of y x^0..x^2
  for (const auto& [x0, y] : xy) {
    const double x = x0 - fallback;
    double p = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += p;
      if (k < 3) t[k] += y * p;
      p *= x;
    }
  }
  const double m[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
  auto det3 = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det3(m);
  if (std::abs(d) < 1e-300) return fallback;
  double mb[3][3], mc[3][3];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      mb[r][c] = c == 1 ? t[r] : m[r][c];
      mc[r][c] = c == 2 ? t[r] : m[r][c];
    }
  }
  const double b = det3(mb) / d;
  const double c = det3(mc) / d;
  if (!(c > 0.0)) return fallback;
  const double vertex = fallback - b / (2.0 * c);
  if (vertex < xy.front().first || vertex > xy.back().first) return fallback;
  return vertex;
}

SweepResult sweep_serial(const SweepSpec& spec) {
  check_spec(spec);
  std::vector<SweepPoint> points;
  points.reserve(spec.lambdas.size());
  for (double l : spec.lambdas) points.push_back(run_point(spec, l));
  return summarize(std::move(points));
}

SweepResult sweep_parallel(const SweepSpec& spec, int threads) {
  check_spec(spec);
  const auto n = static_cast<std::int64_t>(spec.lambdas.size());
  std::vector<SweepPoint> points(spec.lambdas.size());
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    points[i] = run_point(spec, spec.lambdas[i]);
  }
  (void)threads;
  return summarize(std::move(points));
}

BacklogProfile optimal_backlog_profile(const SweepSpec& spec,
                                       Duration rerun_duration, bool parallel) {
  const SweepResult sw = parallel ? sweep_parallel(spec) : sweep_serial(spec);
  RunParams p = spec.params;
  p.duration = rerun_duration;
  BacklogProfile out;
  out.lambda = sw.argmin_lambda;
  out.report = run(spec.topology, OpenLoop{spec.arrivals, out.lambda, Duration{0}}, p);
  return out;
}

namespace {

Replicate run_replicate(const ReplicateSpec& spec, std::uint64_t seed) {
  Replicate r;
  r.seed = seed;
  RunParams p = spec.params;
  p.seed = seed;
  try {
    r.report = run(spec.topology, spec.workload, p);
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

std::vector<Replicate> replicate_serial(const ReplicateSpec& spec) {
  std::vector<Replicate> out;
  out.reserve(spec.seeds.size());
  for (auto s : spec.seeds) out.push_back(run_replicate(spec, s));
  return out;
}

std::vector<Replicate> replicate_parallel(const ReplicateSpec& spec, int threads) {
  const auto n = static_cast<std::int64_t>(spec.seeds.size());
  std::vector<Replicate> out(spec.seeds.size());
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = run_replicate(spec, spec.seeds[i]);
  }
  (void)threads;
  return out;
}

}  // namespace acp::netsim
