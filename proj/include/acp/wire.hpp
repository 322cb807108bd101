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
#include <span>
#include <variant>
#include <vector>

namespace acp::wire {

// Every datagram starts with a fixed 16-byte big-endian header:
//
//   update: version(1) kind=0(1) seq(4) gen_timestamp_us(8) payload_len(2)
//   ack:    version(1) kind=1(1) seq(4) echo_timestamp_us(8) reserved=0(2)
//
// An update is followed by exactly payload_len payload bytes; an ACK carries
// nothing else.

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::size_t kMaxPayload = 0xFFFF;

enum class PacketKind : std::uint8_t { kUpdate = 0, kAck = 1 };

using Bytes = std::vector<std::uint8_t>;

struct UpdateHeader {
  std::uint32_t seq = 0;
  std::uint64_t gen_timestamp_us = 0;
  std::uint16_t payload_len = 0;

  friend bool operator==(const UpdateHeader&, const UpdateHeader&) = default;
};

struct AckHeader {
  std::uint32_t seq = 0;
  std::uint64_t echo_timestamp_us = 0;

  friend bool operator==(const AckHeader&, const AckHeader&) = default;
};

struct UpdatePacket {
  UpdateHeader header;
  Bytes payload;

  friend bool operator==(const UpdatePacket&, const UpdatePacket&) = default;
};

using Packet = std::variant<UpdatePacket, AckHeader>;

/// Throws kEncoding when the payload exceeds 16 bits of length or disagrees
/// with header.payload_len.
Bytes encode_update(const UpdateHeader& header,
                    std::span<const std::uint8_t> payload = {});

Bytes encode_ack(const AckHeader& header);

/// Throws kMalformedPacket on a short buffer, unknown version or kind, or a
/// length mismatch. Callers drop such datagrams.
Packet decode_packet(std::span<const std::uint8_t> raw);

}  // namespace acp::wire
