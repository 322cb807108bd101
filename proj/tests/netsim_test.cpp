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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <map>

#include "acp/analytics.hpp"
#include "acp/error.hpp"
#include "acp/netsim/simulator.hpp"
#include "acp/netsim/sweep.hpp"
#include "acp/netsim/topology.hpp"

namespace acp::netsim {
namespace {

template <typename F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no acp::Error thrown";
  return Errc::kInvalidArgument;
}

RunParams params(double seconds, std::uint64_t seed = 1, bool trace = false) {
  RunParams p;
  p.duration = from_seconds(seconds);
  p.seed = seed;
  p.record_trace = trace;
  return p;
}

Controlled controller(ControllerKind kind, Duration probe_timeout = std::chrono::seconds(1)) {
  Controlled c;
  c.source.controller.kind = kind;
  c.source.init.probe_timeout = probe_timeout;
  return c;
}

TEST(Topology, Validation) {
  Topology t;
  EXPECT_EQ(error_code_of([&] { t.validate(); }), Errc::kConfig);
  t = mm1(1.0);
  t.forward[0].service.rate = 0;
  EXPECT_EQ(error_code_of([&] { t.validate(); }), Errc::kConfig);
  t = mm1(1.0);
  t.forward[0].loss_prob = 1.5;
  EXPECT_EQ(error_code_of([&] { t.validate(); }), Errc::kConfig);
  t = link_chain({1, 1});
  t.cross[0].exit = 5;
  EXPECT_EQ(error_code_of([&] { t.validate(); }), Errc::kConfig);
  EXPECT_EQ(error_code_of([] { (void)six_hop_net('z'); }), Errc::kConfig);
}

TEST(Topology, SymmetricReverseMirrorsForward) {
  const auto t = six_hop_net('b');
  const auto rev = t.reverse_path();
  ASSERT_EQ(rev.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(rev[i].service.rate, t.forward[5 - i].service.rate);
  }
  EXPECT_EQ(t.forward[2].service.rate, 5e6);
  EXPECT_TRUE(mm1(1).reverse_path().empty());
}

TEST(Simulator, Mm1SystemTime) {
  const auto r = run(mm1(1.0), OpenLoop{Arrivals::kPoisson, 0.5}, params(1e6));
  EXPECT_NEAR(r.mean_system_time, 2.0, 0.04);
  EXPECT_NEAR(r.time_avg_age, analytics::mm1_average_age({0.5, 1.0}), 0.07);
  EXPECT_TRUE(std::isnan(r.mean_rtt));
}

TEST(Simulator, DeterministicSynchronisedQueue) {
  const double d = 0.25;
  Topology t = mm1(1.0 / d);
  t.forward[0].service.kind = ServiceKind::kDeterministic;
  const auto r = run(t, OpenLoop{Arrivals::kPeriodic, 1.0 / d}, params(1000));
  EXPECT_NEAR(r.mean_system_time, d, 1e-9);
  EXPECT_NEAR(r.time_avg_age, 1.5 * d, 1e-6);
}

TEST(Simulator, OverloadIsUnstable) {
  RunParams p = params(1e6);
  p.backlog_bound = 1000;
  EXPECT_EQ(error_code_of([&] { (void)run(mm1(1.0), OpenLoop{Arrivals::kPoisson, 1.0}, p); }),
            Errc::kInstability);
  EXPECT_EQ(error_code_of([&] { (void)run(mm1(1.0), OpenLoop{Arrivals::kPoisson, 1.3}, p); }),
            Errc::kInstability);
}

TEST(Simulator, RejectsBadRuns) {
  EXPECT_ANY_THROW((void)run(mm1(1.0), OpenLoop{Arrivals::kPoisson, 0.0}, params(100)));
  RunParams p = params(100);
  p.warmup_fraction = 1.0;
  EXPECT_ANY_THROW((void)run(mm1(1.0), OpenLoop{Arrivals::kPoisson, 0.5}, p));
}

// Every node serves updates in the order they arrived; checked on the trace
// of a lossy chain with cross traffic and ACKs.
TEST(Simulator, FcfsOnTraces) {
  Topology t = six_hop_net('a');
  for (auto& n : t.forward) n.loss_prob = 0.02;
  const auto r = run(t, controller(ControllerKind::kAcp), params(20, 3, true));
  ASSERT_FALSE(r.trace.empty());
  std::map<int, std::vector<std::uint32_t>> arrivals, departures;
  for (const auto& rec : r.trace) {
    if (rec.node < 0) continue;
    if (rec.kind == TraceKind::kArrive) arrivals[rec.node].push_back(rec.seq);
    // A loss is logged after the departure it follows.
    if (rec.kind == TraceKind::kDepart) departures[rec.node].push_back(rec.seq);
  }
  EXPECT_EQ(arrivals.size(), 12u);
  for (const auto& [node, out] : departures) {
    const auto& in = arrivals[node];
    ASSERT_LE(out.size(), in.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      ASSERT_EQ(out[i], in[i]) << "node " << node << " position " << i;
    }
  }
}

TEST(Simulator, Conservation) {
  Topology t = six_hop_net('c');
  for (auto& n : t.forward) n.loss_prob = 0.05;
  for (auto kind : {ControllerKind::kAcp, ControllerKind::kLazy}) {
    const auto r = run(t, controller(kind), params(50, 9));
    EXPECT_EQ(r.updates_delivered + r.updates_dropped + r.updates_in_flight,
              r.updates_generated);
    EXPECT_GT(r.updates_dropped, 0u);
  }
  const auto open = run(mm1(1.0), OpenLoop{Arrivals::kPoisson, 0.9}, params(1e4));
  EXPECT_EQ(open.updates_delivered + open.updates_dropped + open.updates_in_flight,
            open.updates_generated);
}

TEST(Simulator, LittlesLawPerNode) {
  const auto r = run(tandem(1.0, 2.0), OpenLoop{Arrivals::kPoisson, 0.6}, params(4e5, 2));
  for (const auto& n : r.forward) {
    ASSERT_GE(n.departures, 100000u) << n.name;
    EXPECT_NEAR(n.avg_backlog, n.throughput * n.mean_sojourn, 0.03 * n.avg_backlog) << n.name;
  }
}

TEST(Simulator, AgeAtLeastBottleneckService) {
  const auto r = run(tandem(1.0, 5.0), OpenLoop{Arrivals::kPoisson, 0.5}, params(1e4));
  EXPECT_GE(r.time_avg_age, 1.0);
}

bool same_report(const SimReport& a, const SimReport& b) {
  auto eq = [](double x, double y) {
    return std::memcmp(&x, &y, sizeof x) == 0;
  };
  if (!eq(a.time_avg_age, b.time_avg_age) || !eq(a.source_est_age, b.source_est_age) ||
      !eq(a.total_backlog, b.total_backlog) || !eq(a.mean_rtt, b.mean_rtt) ||
      !eq(a.achieved_lambda, b.achieved_lambda) ||
      a.updates_generated != b.updates_generated ||
      a.updates_delivered != b.updates_delivered || a.epochs.size() != b.epochs.size() ||
      a.trace.size() != b.trace.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    if (!eq(a.epochs[i].record.lambda, b.epochs[i].record.lambda)) return false;
  }
  return true;
}

TEST(Simulator, DeterministicForSeed) {
  const auto t = six_hop_net('b');
  const auto a = run(t, controller(ControllerKind::kAcp), params(30, 4, true));
  const auto b = run(t, controller(ControllerKind::kAcp), params(30, 4, true));
  EXPECT_TRUE(same_report(a, b));
  const auto c = run(t, controller(ControllerKind::kAcp), params(30, 5, true));
  EXPECT_NE(a.time_avg_age, c.time_avg_age);
}

TEST(Simulator, ReplayReproducesDecisions) {
  const auto t = six_hop_net('a');
  Controlled w = controller(ControllerKind::kAcp);
  const auto r = run(t, w, params(60, 8));
  ASSERT_GT(r.epochs.size(), 10u);
  const auto replayed = replay_source(w.source, r.source_events);
  ASSERT_EQ(replayed.size(), r.epochs.size());
  for (std::size_t i = 0; i < replayed.size(); ++i) {
    const auto& x = replayed[i].record;
    const auto& y = r.epochs[i].record;
    ASSERT_EQ(x.lambda, y.lambda) << i;
    ASSERT_EQ(x.decision.has_value(), y.decision.has_value()) << i;
    if (x.decision) {
      ASSERT_EQ(x.decision->action, y.decision->action) << i;
    }
    ASSERT_EQ(x.stats.avg_age, y.stats.avg_age) << i;
  }
}

TEST(Simulator, InitFailureOnDeadPath) {
  Topology t = mm1(1.0);
  t.forward[0].loss_prob = 1.0;
  EXPECT_EQ(error_code_of([&] { (void)run(t, controller(ControllerKind::kAcp), params(100)); }),
            Errc::kConnectionFailed);
}

TEST(Sweep, LinearGrid) {
  const auto g = linear_grid(0.1, 0.9, 9);
  ASSERT_EQ(g.size(), 9u);
  EXPECT_DOUBLE_EQ(g.front(), 0.1);
  EXPECT_DOUBLE_EQ(g.back(), 0.9);
  EXPECT_NEAR(g[4], 0.5, 1e-15);
}

TEST(Sweep, RefineRecoversParabolaVertex) {
  std::vector<SweepPoint> pts;
  for (double x : linear_grid(0.1, 0.9, 9)) {
    SweepPoint p;
    p.lambda = x;
    p.ok = true;
    p.age = 2.0 + 3.0 * (x - 0.537) * (x - 0.537);
    pts.push_back(p);
  }
  EXPECT_NEAR(refine_argmin(pts, 4), 0.537, 1e-12);
  // Concave data keeps the grid value.
  for (auto& p : pts) p.age = -p.age;
  EXPECT_DOUBLE_EQ(refine_argmin(pts, 4), pts[4].lambda);
}

TEST(Sweep, Mm1BowlMatchesClosedForm) {
  SweepSpec s;
  s.topology = mm1(1.0);
  s.lambdas = linear_grid(0.1, 0.8, 8);
  s.params = params(5e5);
  const auto res = sweep_parallel(s);
  for (const auto& p : res.points) {
    ASSERT_TRUE(p.ok);
    EXPECT_NEAR(p.age, analytics::mm1_average_age({p.lambda, 1.0}),
                0.04 * analytics::mm1_average_age({p.lambda, 1.0}))
        << p.lambda;
  }
  EXPECT_NEAR(res.argmin_lambda, 0.531, 0.05);
}

TEST(Sweep, SerialAndParallelAgree) {
  SweepSpec s;
  s.topology = six_hop_net('b');
  s.arrivals = Arrivals::kPeriodic;
  s.lambdas = linear_grid(100, 900, 9);
  s.params = params(50);
  const auto a = sweep_serial(s);
  const auto b = sweep_parallel(s, 4);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].ok, b.points[i].ok);
    EXPECT_EQ(a.points[i].age, b.points[i].age);
    EXPECT_EQ(a.points[i].node_backlog, b.points[i].node_backlog);
  }
  EXPECT_EQ(a.argmin_lambda, b.argmin_lambda);
}

TEST(Sweep, UnstablePointsAreReported) {
  SweepSpec s;
  s.topology = mm1(1.0);
  s.lambdas = {0.5, 1.5};
  s.params = params(1e5);
  s.params.backlog_bound = 500;
  const auto res = sweep_serial(s);
  EXPECT_TRUE(res.points[0].ok);
  EXPECT_FALSE(res.points[1].ok);
  EXPECT_FALSE(res.points[1].error.empty());
  EXPECT_EQ(res.grid_argmin, 0u);

  s.lambdas = {1.5, 2.0};
  EXPECT_EQ(error_code_of([&] { (void)sweep_serial(s); }), Errc::kInstability);
}

TEST(Replicates, SerialAndParallelAgree) {
  ReplicateSpec s;
  s.topology = tandem(1.0, 1.0);
  // Unit-rate queues have RTTs of seconds.
  s.workload = controller(ControllerKind::kLazy, std::chrono::seconds(50));
  s.params = params(500);
  s.seeds = {1, 2, 3, 4};
  const auto a = replicate_serial(s);
  const auto b = replicate_parallel(s, 3);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].seed, s.seeds[i]);
    ASSERT_TRUE(a[i].ok) << a[i].error;
    EXPECT_TRUE(same_report(a[i].report, b[i].report)) << i;
  }
}

}  // namespace
}  // namespace acp::netsim
