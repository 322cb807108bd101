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

#include "acp/error.hpp"

namespace acp {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kSequencing: return "sequencing";
    case Errc::kTimeOrder: return "time-order";
    case Errc::kClockAnomaly: return "clock-anomaly";
    case Errc::kDegenerateInterval: return "degenerate-interval";
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kEstimatorNotReady: return "estimator-not-ready";
    case Errc::kEncoding: return "encoding";
    case Errc::kMalformedPacket: return "malformed-packet";
    case Errc::kConnectionFailed: return "connection-failed";
    case Errc::kInstability: return "instability";
    case Errc::kDomain: return "domain";
    case Errc::kConfig: return "config";
    case Errc::kSchema: return "schema";
    case Errc::kNetwork: return "network";
  }
  return "unknown";
}

}  // namespace acp
