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

#include "acp/control.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "acp/error.hpp"

namespace acp {

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kInc: return "INC";
    case ActionKind::kDec: return "DEC";
    case ActionKind::kMdec: return "MDEC";
  }
  return "?";
}

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::kBothRising: return "both-rising";
    case Branch::kBacklogRisingOnly: return "backlog-rising";
    case Branch::kAgeRisingOnly: return "age-rising";
    case Branch::kOtherwise: return "otherwise";
  }
  return "?";
}

double target_for(const Action& action, const ControlParams& params,
                  double avg_backlog) {
  switch (action.kind) {
    case ActionKind::kInc: return params.kappa;
    case ActionKind::kDec: return -params.kappa;
    case ActionKind::kMdec:
      return -(1.0 - std::ldexp(1.0, -action.gamma)) * avg_backlog;
  }
  return 0.0;
}

ControlDecision decide(ControlState& state, const ControlParams& params,
                       double backlog_change, double age_change,
                       double avg_backlog) {
  const double b = backlog_change;
  const double delta = age_change;
  const double guard_ref = params.guard == GuardReference::kPreviousTarget
                               ? state.prev_target
                               : state.prev_backlog_change;

  auto bump_gamma = [&] { state.gamma = std::min(state.gamma + 1, params.gamma_cap); };
  auto mdec = [&] { return Action{ActionKind::kMdec, state.gamma}; };
  auto reset = [&] {
    state.flag = false;
    state.gamma = 0;
  };

  ControlDecision out;
  if (b > 0 && delta > 0) {
    out.branch = Branch::kBothRising;
    if (state.flag) {
      bump_gamma();
      out.action = mdec();
    } else {
      out.action = {ActionKind::kDec, 0};
    }
    state.flag = true;
  } else if (b > 0 && delta < 0) {
    out.branch = Branch::kBacklogRisingOnly;
    if (state.flag && std::abs(b) < 0.5 * std::abs(guard_ref)) {
      bump_gamma();
      out.action = mdec();
    } else {
      out.action = {ActionKind::kInc, 0};
      reset();
    }
  } else if (b < 0 && delta > 0) {
    out.branch = Branch::kAgeRisingOnly;
    out.action = {ActionKind::kInc, 0};
    reset();
  } else {
    out.branch = Branch::kOtherwise;
    if (state.flag && state.gamma > 0) {
      out.action = mdec();
    } else {
      out.action = {ActionKind::kDec, 0};
      reset();
    }
  }

  out.target = target_for(out.action, params, avg_backlog);
  state.prev_target = out.target;
  state.prev_backlog_change = b;
  return out;
}

double clamp_rate(double lambda, const ControlParams& params) {
  if (std::isnan(lambda)) return params.lambda_min;
  return std::clamp(lambda, params.lambda_min, params.lambda_max);
}

double target_to_rate(double z_bar, double tau, double target,
                      const ControlParams& params) {
  if (!(z_bar > 0.0) || !(tau > 0.0)) {
    fail(Errc::kEstimatorNotReady,
         fmt::format("rate mapping needs positive estimates (z_bar={}, "
                     "tau={})",
                     z_bar, tau));
  }
  return clamp_rate(1.0 / z_bar + target / tau, params);
}

double epoch_period(double rtt_bar, double z_bar, int multiplier) {
  if (!(rtt_bar > 0.0) || !(z_bar > 0.0) || multiplier < 1) {
    fail(Errc::kEstimatorNotReady,
         fmt::format("epoch period needs positive estimates (rtt_bar={}, "
                     "z_bar={}, multiplier={})",
                     rtt_bar, z_bar, multiplier));
  }
  return multiplier * std::min(rtt_bar, z_bar);
}

double lazy_rate(double rtt_bar, const ControlParams& params) {
  if (!(rtt_bar > 0.0)) {
    fail(Errc::kEstimatorNotReady,
         fmt::format("Lazy rate needs a positive RTT estimate, got {}",
                     rtt_bar));
  }
  return clamp_rate(1.0 / rtt_bar, params);
}

AcpController::AcpController(ControlParams params) : params_(params) {
  if (!(params_.lambda_min > 0.0) || params_.lambda_max < params_.lambda_min) {
    fail(Errc::kInvalidArgument,
         fmt::format("rate bounds [{}, {}] are invalid", params_.lambda_min,
                     params_.lambda_max));
  }
  if (!(params_.kappa > 0.0)) {
    fail(Errc::kInvalidArgument,
         fmt::format("step size must be positive, got {}", params_.kappa));
  }
}

void AcpController::start(double initial_lambda) {
  state_ = ControlState{};
  state_.lambda = clamp_rate(initial_lambda, params_);
}

EpochDecision AcpController::on_epoch(const EpochStats& stats, double rtt_bar,
                                      double z_bar) {
  EpochDecision rec;
  rec.stats = stats;
  if (state_.epoch_index > 0) {
    rec.backlog_change = stats.avg_backlog - state_.prev_avg_backlog;
    rec.age_change = stats.avg_age - state_.prev_avg_age;
    ControlDecision d = decide(state_, params_, rec.backlog_change,
                               rec.age_change, stats.avg_backlog);
    const double tau = std::min(rtt_bar, z_bar);
    d.new_lambda = target_to_rate(z_bar, tau, d.target, params_);
    state_.lambda = d.new_lambda;
    rec.decision = d;
  }
  state_.prev_avg_age = stats.avg_age;
  state_.prev_avg_backlog = stats.avg_backlog;
  ++state_.epoch_index;
  rec.lambda = state_.lambda;
  return rec;
}

EpochDecision AcpController::hold(const EpochStats& stats) {
  EpochDecision rec;
  rec.stats = stats;
  if (state_.epoch_index > 0) {
    rec.backlog_change = stats.avg_backlog - state_.prev_avg_backlog;
    rec.age_change = stats.avg_age - state_.prev_avg_age;
  }
  state_.prev_avg_age = stats.avg_age;
  state_.prev_avg_backlog = stats.avg_backlog;
  ++state_.epoch_index;
  rec.lambda = state_.lambda;
  return rec;
}

}  // namespace acp
