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
#include <optional>
#include <string_view>

#include "acp/sample_path.hpp"

namespace acp {

enum class ActionKind : std::uint8_t { kInc, kDec, kMdec };

struct Action {
  ActionKind kind = ActionKind::kDec;
  int gamma = 0;  // >= 1 for kMdec, 0 otherwise

  friend bool operator==(const Action&, const Action&) = default;
};

/// Which arm of the decision chain produced an action.
enum class Branch : std::uint8_t {
  kBothRising,        // b > 0, delta > 0
  kBacklogRisingOnly, // b > 0, delta < 0
  kAgeRisingOnly,     // b < 0, delta > 0
  kOtherwise,         // everything else, including zero differences
};

std::string_view to_string(ActionKind kind);
std::string_view to_string(Branch branch);

/// What the guard on the backlog-rising/age-falling arm compares |b_k|
/// against. The default is the target commanded at the previous epoch.
enum class GuardReference : std::uint8_t { kPreviousTarget, kPreviousChange };

struct ControlParams {
  double kappa = 0.25;  // additive step, packets
  double lambda_min = 0.1;
  double lambda_max = 1e4;
  int gamma_cap = 30;
  int epoch_multiplier = 10;
  GuardReference guard = GuardReference::kPreviousTarget;
};

struct ControlState {
  bool flag = false;
  int gamma = 0;
  double lambda = 0.0;            // updates/s in force for the current epoch
  double prev_avg_age = 0.0;      // seconds
  double prev_avg_backlog = 0.0;  // packets
  double prev_target = 0.0;       // packets
  double prev_backlog_change = 0.0;
  std::uint64_t epoch_index = 0;  // number of closed epochs
};

struct ControlDecision {
  Action action;
  Branch branch = Branch::kOtherwise;
  double target = 0.0;      // commanded change in average backlog, packets
  double new_lambda = 0.0;  // filled by the caller after rate mapping
};

/// One step of the backlog/age decision chain. Updates flag, gamma,
/// prev_target and prev_backlog_change in `state` and returns the action with
/// its backlog target. Pure in its inputs.
ControlDecision decide(ControlState& state, const ControlParams& params,
                       double backlog_change, double age_change,
                       double avg_backlog);

/// Target backlog change for an action at the current average backlog.
double target_for(const Action& action, const ControlParams& params,
                  double avg_backlog);

/// lambda = 1/z_bar + target/tau, clamped to [lambda_min, lambda_max].
double target_to_rate(double z_bar, double tau, double target,
                      const ControlParams& params);

/// multiplier * min(rtt_bar, z_bar).
double epoch_period(double rtt_bar, double z_bar, int multiplier);

/// Rate of the Lazy baseline: 1/rtt_bar, clamped.
double lazy_rate(double rtt_bar, const ControlParams& params);

double clamp_rate(double lambda, const ControlParams& params);

/// Per-epoch record kept for traces.
struct EpochDecision {
  EpochStats stats;
  double backlog_change = 0.0;  // b_k
  double age_change = 0.0;      // delta_k
  std::optional<ControlDecision> decision;  // empty for the first epoch
  double lambda = 0.0;  // rate in force for the next epoch
};

/// ACP controller: folds closed epochs into decisions and rates.
class AcpController {
 public:
  explicit AcpController(ControlParams params = {});

  /// Seeds the rate used for the first epoch.
  void start(double initial_lambda);

  /// Consumes the averages of a just-closed epoch. The first epoch only
  /// records its averages; later epochs run `decide` and map the target to a
  /// rate using the current estimators.
  EpochDecision on_epoch(const EpochStats& stats, double rtt_bar,
                         double z_bar);

  /// Records an epoch's averages and differences without deciding; the rate
  /// stays where it is.
  EpochDecision hold(const EpochStats& stats);

  const ControlState& state() const noexcept { return state_; }
  const ControlParams& params() const noexcept { return params_; }
  double lambda() const noexcept { return state_.lambda; }

 private:
  ControlParams params_;
  ControlState state_;
};

}  // namespace acp
