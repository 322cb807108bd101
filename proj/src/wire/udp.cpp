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

#include "acp/udp.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <fmt/format.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "acp/error.hpp"

namespace acp {

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
  fail(Errc::kNetwork, fmt::format("{}: {}", what, std::strerror(errno)));
}

sockaddr_in lookup(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res);
  if (rc != 0 || res == nullptr) {
    fail(Errc::kNetwork,
         fmt::format("cannot resolve '{}': {}", host, ::gai_strerror(rc)));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, res->ai_addr, sizeof(addr));
  ::freeaddrinfo(res);
  addr.sin_port = htons(port);
  return addr;
}

std::string peer_name(const sockaddr_in& addr) {
  char buf[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof(buf));
  return fmt::format("{}:{}", buf, ntohs(addr.sin_port));
}

}  // namespace

UdpTransport::UdpTransport(Clock& clock, const std::string& host,
                           std::uint16_t port)
    : clock_(clock) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) sys_fail("socket");
  const sockaddr_in addr = lookup(host, port);
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
    const int saved = errno;
    ::close(fd_);
    fd_ = -1;
    errno = saved;
    sys_fail(fmt::format("bind {}:{}", host, port));
  }
}

UdpTransport::~UdpTransport() {
  if (fd_ >= 0) ::close(fd_);
}

std::uint16_t UdpTransport::local_port() const {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
    sys_fail("getsockname");
  }
  return ntohs(addr.sin_port);
}

const sockaddr_in& UdpTransport::resolve(const std::string& dest) {
  if (auto it = peers_.find(dest); it != peers_.end()) return it->second;
  const auto colon = dest.rfind(':');
  if (colon == std::string::npos) {
    fail(Errc::kNetwork, fmt::format("peer '{}' is not host:port", dest));
  }
  int port = 0;
  try {
    port = std::stoi(dest.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port <= 0 || port > 0xFFFF) {
    fail(Errc::kNetwork, fmt::format("peer '{}' has an invalid port", dest));
  }
  return peers_
      .emplace(dest, lookup(dest.substr(0, colon),
                            static_cast<std::uint16_t>(port)))
      .first->second;
}

void UdpTransport::send(std::span<const std::uint8_t> bytes,
                        const std::string& dest) {
  const sockaddr_in& addr = resolve(dest);
  const ssize_t n =
      ::sendto(fd_, bytes.data(), bytes.size(), 0,
               reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
  // A full socket buffer or an ICMP-refused peer is a lost datagram.
  if (n < 0 && errno != EAGAIN && errno != ECONNREFUSED && errno != ENOBUFS) {
    sys_fail(fmt::format("sendto {}", dest));
  }
}

std::optional<Datagram> UdpTransport::receive(TimePoint deadline) {
  pollfd pfd{fd_, POLLIN, 0};
  for (;;) {
    const Duration left = deadline - clock_.now();
    const std::int64_t us = std::max<std::int64_t>(0, left.count());
    const timespec ts{static_cast<time_t>(us / 1000000),
                      static_cast<long>((us % 1000000) * 1000)};
    const int rc = ::ppoll(&pfd, 1, &ts, nullptr);
    if (rc < 0) {
      if (errno == EINTR) return std::nullopt;
      sys_fail("ppoll");
    }
    if (rc == 0) return std::nullopt;

    std::uint8_t buf[65536];
    sockaddr_in from{};
    socklen_t len = sizeof(from);
    const ssize_t n = ::recvfrom(fd_, buf, sizeof(buf), 0,
                                 reinterpret_cast<sockaddr*>(&from), &len);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN || errno == ECONNREFUSED) {
        if (clock_.now() >= deadline) return std::nullopt;
        continue;
      }
      sys_fail("recvfrom");
    }
    Datagram d;
    d.recv_time = clock_.now();
    d.bytes.assign(buf, buf + n);
    d.peer = peer_name(from);
    return d;
  }
}

void run_monitor(Monitor& monitor, Transport& transport, Clock& clock,
                 const MonitorRunOptions& options) {
  const TimePoint start = clock.now();
  const TimePoint end = options.max_duration == Duration::max()
                            ? TimePoint::max()
                            : start + options.max_duration;
  std::optional<TimePoint> last_seen;
  constexpr Duration kPollSlice = std::chrono::milliseconds(100);

  for (;;) {
    if (options.stop && options.stop->load()) return;
    const TimePoint now = clock.now();
    if (now >= end) return;
    if (last_seen && options.idle_timeout != Duration::max() &&
        now - *last_seen >= options.idle_timeout) {
      return;
    }
    auto dg = transport.receive(std::min(end, now + kPollSlice));
    if (!dg) continue;
    last_seen = dg->recv_time;
    if (auto ack = monitor.on_datagram(dg->bytes, dg->peer, dg->recv_time)) {
      transport.send(*ack, dg->peer);
    }
  }
}

}  // namespace acp
