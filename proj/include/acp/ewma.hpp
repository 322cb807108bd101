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

#include <optional>

namespace acp {

/// Exponentially weighted moving average over strictly positive samples
/// (seconds). The first sample is taken verbatim.
class Ewma {
 public:
  static constexpr double kDefaultAlpha = 0.125;

  explicit Ewma(double alpha = kDefaultAlpha);

  void update(double sample);

  bool initialized() const noexcept { return value_.has_value(); }
  double alpha() const noexcept { return alpha_; }

  /// Throws kEstimatorNotReady before the first sample.
  double value() const;
  std::optional<double> value_or_empty() const noexcept { return value_; }

 private:
  double alpha_;
  std::optional<double> value_;
};

}  // namespace acp
