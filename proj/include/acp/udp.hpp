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

#include <atomic>
#include <cstdint>
#include <string>
#include <unordered_map>

#include <netinet/in.h>

#include "acp/runtime.hpp"

namespace acp {

/// IPv4 datagram socket. Peers are named "host:port".
class UdpTransport final : public Transport {
 public:
  /// Binds to host:port (port 0 picks an ephemeral port). Throws kNetwork.
  UdpTransport(Clock& clock, const std::string& host, std::uint16_t port);
  ~UdpTransport() override;

  UdpTransport(const UdpTransport&) = delete;
  UdpTransport& operator=(const UdpTransport&) = delete;

  void send(std::span<const std::uint8_t> bytes,
            const std::string& dest) override;
  std::optional<Datagram> receive(TimePoint deadline) override;

  std::uint16_t local_port() const;

 private:
  const sockaddr_in& resolve(const std::string& dest);

  Clock& clock_;
  int fd_ = -1;
  std::unordered_map<std::string, sockaddr_in> peers_;
};

struct MonitorRunOptions {
  Duration max_duration = Duration::max();
  /// Exit after this long without any datagram once one has been seen.
  Duration idle_timeout = Duration::max();
  const std::atomic<bool>* stop = nullptr;
};

/// Serves updates until stopped, idle or out of time.
void run_monitor(Monitor& monitor, Transport& transport, Clock& clock,
                 const MonitorRunOptions& options);

}  // namespace acp
