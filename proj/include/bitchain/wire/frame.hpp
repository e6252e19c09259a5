/* Copyright 2026 The bitchain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
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

#include "bitchain/bytes.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace bitchain::wire {

inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 26;
inline constexpr std::uint8_t kMagic = 0xA5;
inline constexpr std::uint8_t kFlagPure = 0x01;

enum class Mode : std::uint8_t { ActiveMessage = 0, Prelinked = 1, Portable = 2 };

std::string_view to_string(Mode mode) noexcept;

//  0 u32 version | 4 u64 type_id | 12 u8 mode | 13 u8 flags | 14 u32 src_node
// 18 u32 payload_len | 22 u32 code_len          (26 bytes, little-endian)
//
// For ActiveMessage frames code_len carries the handler index instead.
struct FrameHeader {
  std::uint32_t version = kVersion;
  std::uint64_t type_id = 0;
  Mode mode = Mode::Portable;
  std::uint8_t flags = 0;
  std::uint32_t src_node = 0;
  std::uint32_t payload_len = 0;
  std::uint32_t code_len = 0;

  bool pure() const noexcept { return flags & kFlagPure; }
  std::uint32_t am_index() const noexcept { return code_len; }
  bool operator==(const FrameHeader&) const = default;
};

void encode_header(const FrameHeader& h, std::uint8_t* out) noexcept;
FrameHeader decode_header(const std::uint8_t* in) noexcept;

/// Offset of the first signal byte (end of payload).
constexpr std::size_t magic1_offset(const FrameHeader& h) noexcept { return kHeaderSize + h.payload_len; }
/// Offset of the trailing signal byte; meaningless for ActiveMessage frames.
constexpr std::size_t magic2_offset(const FrameHeader& h) noexcept {
  return kHeaderSize + std::size_t{h.payload_len} + 1 + h.code_len;
}

/// Bytes on the wire when the code section is sent.
std::size_t full_len(const FrameHeader& h) noexcept;

/// Bytes on the wire when the receiver already caches the code: everything up
/// to and including the first signal byte.
std::uint32_t truncated_len(const FrameHeader& h) noexcept;

/// header | payload | 0xA5 | code | 0xA5, or header | payload | 0xA5 for
/// ActiveMessage. Throws Errc::invalid_argument when lengths disagree with
/// the header or an ifunc frame has no code.
ByteVec encode_frame(const FrameHeader& header, ByteSpan payload, ByteSpan code_section);

/// An immutable, fully built message frame. Copies share the bytes.
class MessageFrame {
public:
  MessageFrame() = default;
  MessageFrame(FrameHeader header, ByteSpan payload, ByteSpan code_section);

  const FrameHeader& header() const noexcept { return header_; }
  ByteSpan bytes() const noexcept { return *bytes_; }
  ByteSpan payload() const noexcept { return bytes().subspan(kHeaderSize, header_.payload_len); }
  ByteSpan code_section() const noexcept;
  std::size_t full_len() const noexcept { return bytes_->size(); }
  std::uint32_t truncated_len() const noexcept { return wire::truncated_len(header_); }
  ByteSpan truncated() const noexcept { return bytes().first(truncated_len()); }
  bool valid() const noexcept { return bytes_ != nullptr; }

private:
  FrameHeader header_;
  std::shared_ptr<const ByteVec> bytes_;
};

/// A parsed view into slot memory.
struct FrameView {
  FrameHeader header;
  ByteSpan payload;
  ByteSpan code_section; // empty when not delivered or not expected
};

enum class DeliveryState { NotYet, Complete, Corrupt };

struct Delivery {
  DeliveryState state = DeliveryState::NotYet;
  FrameView view;
  std::string reason; // set when Corrupt
};

/// Header-only peek. nullopt when the header bytes are still all zero.
/// Throws Errc::frame_corrupt when a non-zero header is not a valid v1
/// header or its lengths do not fit the slot.
std::optional<FrameHeader> peek_header(ByteSpan slot);

/// Delivery detection on a zero-filled slot written in order. Signal byte
/// positions are computed from header lengths, so payload bytes equal to
/// 0xA5 never complete a frame early. Never reads past slot.size().
Delivery detect_delivery(ByteSpan slot, bool expect_code) noexcept;

/// Parses an exact full or truncated frame encoding. Throws on any mismatch.
FrameView parse_frame(ByteSpan bytes);

} // namespace bitchain::wire
