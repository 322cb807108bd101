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

#include <chrono>
#include <cmath>
#include <cstdint>

namespace acp {

/// Clock tag for connection-relative time. Both the wall-clock runtime and the
/// simulator express instants as microseconds since the connection origin.
struct ConnectionClock {
  using rep = std::int64_t;
  using period = std::micro;
  using duration = std::chrono::duration<rep, period>;
  using time_point = std::chrono::time_point<ConnectionClock>;
  static constexpr bool is_steady = true;
};

using Duration = ConnectionClock::duration;
using TimePoint = ConnectionClock::time_point;

inline constexpr TimePoint kOrigin{};

inline constexpr double to_seconds(Duration d) {
  return static_cast<double>(d.count()) * 1e-6;
}

inline constexpr double to_seconds(TimePoint t) {
  return to_seconds(t.time_since_epoch());
}

/// Rounds to the nearest microsecond.
inline Duration from_seconds(double s) {
  return Duration{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

inline TimePoint at_seconds(double s) { return TimePoint{from_seconds(s)}; }

inline constexpr TimePoint at_micros(std::int64_t us) {
  return TimePoint{Duration{us}};
}

}  // namespace acp
