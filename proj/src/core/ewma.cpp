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

#include "acp/ewma.hpp"

#include <cmath>
#include <fmt/format.h>

#include "acp/error.hpp"

namespace acp {

Ewma::Ewma(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    fail(Errc::kInvalidArgument,
         fmt::format("EWMA weight must lie in (0, 1], got {}", alpha));
  }
}

void Ewma::update(double sample) {
  if (!(sample > 0.0) || !std::isfinite(sample)) {
    fail(Errc::kInvalidArgument,
         fmt::format("EWMA sample must be positive and finite, got {}", sample));
  }
  if (!value_) {
    value_ = sample;
    return;
  }
  value_ = (1.0 - alpha_) * *value_ + alpha_ * sample;
}

double Ewma::value() const {
  if (!value_) fail(Errc::kEstimatorNotReady, "EWMA has no samples yet");
  return *value_;
}

}  // namespace acp
