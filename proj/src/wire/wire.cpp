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

#include "acp/wire.hpp"

#include <fmt/format.h>

#include "acp/error.hpp"

namespace acp::wire {

namespace {

template <typename T>
void put_be(Bytes& out, T value) {
  for (int shift = 8 * (static_cast<int>(sizeof(T)) - 1); shift >= 0;
       shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

template <typename T>
T get_be(std::span<const std::uint8_t> in, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value = static_cast<T>((value << 8) | in[offset + i]);
  }
  return value;
}

[[noreturn]] void malformed(const std::string& why) {
  fail(Errc::kMalformedPacket, why);
}

}  // namespace

Bytes encode_update(const UpdateHeader& header,
                    std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxPayload) {
    fail(Errc::kEncoding,
         fmt::format("payload of {} bytes exceeds the {}-byte limit",
                     payload.size(), kMaxPayload));
  }
  if (payload.size() != header.payload_len) {
    fail(Errc::kEncoding,
         fmt::format("payload has {} bytes but header says {}", payload.size(),
                     header.payload_len));
  }
  Bytes out;
  out.reserve(kHeaderSize + payload.size());
  put_be(out, kVersion);
  put_be(out, static_cast<std::uint8_t>(PacketKind::kUpdate));
  put_be(out, header.seq);
  put_be(out, header.gen_timestamp_us);
  put_be(out, header.payload_len);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bytes encode_ack(const AckHeader& header) {
  Bytes out;
  out.reserve(kHeaderSize);
  put_be(out, kVersion);
  put_be(out, static_cast<std::uint8_t>(PacketKind::kAck));
  put_be(out, header.seq);
  put_be(out, header.echo_timestamp_us);
  put_be(out, std::uint16_t{0});
  return out;
}

Packet decode_packet(std::span<const std::uint8_t> raw) {
  if (raw.size() < kHeaderSize) {
    malformed(fmt::format("datagram of {} bytes is shorter than the header",
                          raw.size()));
  }
  if (raw[0] != kVersion) {
    malformed(fmt::format("unknown version {}", raw[0]));
  }
  const auto seq = get_be<std::uint32_t>(raw, 2);
  const auto stamp = get_be<std::uint64_t>(raw, 6);
  const auto tail = get_be<std::uint16_t>(raw, 14);

  switch (static_cast<PacketKind>(raw[1])) {
    case PacketKind::kUpdate: {
      if (raw.size() != kHeaderSize + tail) {
        malformed(fmt::format("update declares {} payload bytes, datagram "
                              "carries {}",
                              tail, raw.size() - kHeaderSize));
      }
      UpdatePacket pkt;
      pkt.header = {seq, stamp, tail};
      pkt.payload.assign(raw.begin() + kHeaderSize, raw.end());
      return pkt;
    }
    case PacketKind::kAck:
      if (raw.size() != kHeaderSize) {
        malformed(fmt::format("ACK of {} bytes, expected {}", raw.size(),
                              kHeaderSize));
      }
      return AckHeader{seq, stamp};
  }
  malformed(fmt::format("unknown packet kind {}", raw[1]));
}

}  // namespace acp::wire
