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

#include "bitchain/wire/frame.hpp"

#include <algorithm>

namespace bitchain::wire {

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
  case Mode::ActiveMessage: return "am";
  case Mode::Prelinked: return "binary";
  case Mode::Portable: return "bitcode";
  }
  return "?";
}

void encode_header(const FrameHeader& h, std::uint8_t* out) noexcept {
  store_le<std::uint32_t>(out + 0, h.version);
  store_le<std::uint64_t>(out + 4, h.type_id);
  out[12] = static_cast<std::uint8_t>(h.mode);
  out[13] = h.flags;
  store_le<std::uint32_t>(out + 14, h.src_node);
  store_le<std::uint32_t>(out + 18, h.payload_len);
  store_le<std::uint32_t>(out + 22, h.code_len);
}

FrameHeader decode_header(const std::uint8_t* in) noexcept {
  FrameHeader h;
  h.version = load_le<std::uint32_t>(in + 0);
  h.type_id = load_le<std::uint64_t>(in + 4);
  h.mode = static_cast<Mode>(in[12]);
  h.flags = in[13];
  h.src_node = load_le<std::uint32_t>(in + 14);
  h.payload_len = load_le<std::uint32_t>(in + 18);
  h.code_len = load_le<std::uint32_t>(in + 22);
  return h;
}

std::size_t full_len(const FrameHeader& h) noexcept {
  if (h.mode == Mode::ActiveMessage)
    return kHeaderSize + std::size_t{h.payload_len} + 1;
  return kHeaderSize + std::size_t{h.payload_len} + 2 + h.code_len;
}

std::uint32_t truncated_len(const FrameHeader& h) noexcept {
  return static_cast<std::uint32_t>(kHeaderSize + h.payload_len + 1);
}

ByteVec encode_frame(const FrameHeader& header, ByteSpan payload, ByteSpan code_section) {
  if (header.version != kVersion)
    throw Error(Errc::invalid_argument, "header version must be 1");
  if (static_cast<std::uint8_t>(header.mode) > 2)
    throw Error(Errc::invalid_argument, "bad mode");
  if (payload.size() != header.payload_len)
    throw Error(Errc::invalid_argument, "payload length disagrees with header");
  bool am = header.mode == Mode::ActiveMessage;
  if (am && !code_section.empty())
    throw Error(Errc::invalid_argument, "active messages carry no code");
  if (!am && (code_section.size() != header.code_len || header.code_len == 0))
    throw Error(Errc::invalid_argument, "code length disagrees with header or is zero");
  ByteVec out(full_len(header));
  encode_header(header, out.data());
  std::copy(payload.begin(), payload.end(), out.begin() + kHeaderSize);
  out[magic1_offset(header)] = kMagic;
  if (!am) {
    std::copy(code_section.begin(), code_section.end(),
              out.begin() + static_cast<std::ptrdiff_t>(magic1_offset(header) + 1));
    out[magic2_offset(header)] = kMagic;
  }
  return out;
}

MessageFrame::MessageFrame(FrameHeader header, ByteSpan payload, ByteSpan code_section)
    : header_(header), bytes_(std::make_shared<const ByteVec>(encode_frame(header, payload, code_section))) {}

ByteSpan MessageFrame::code_section() const noexcept {
  if (header_.mode == Mode::ActiveMessage)
    return {};
  return bytes().subspan(magic1_offset(header_) + 1, header_.code_len);
}

std::optional<FrameHeader> peek_header(ByteSpan slot) {
  if (slot.size() < kHeaderSize)
    throw Error(Errc::frame_corrupt, "slot smaller than a header");
  if (std::all_of(slot.begin(), slot.begin() + kHeaderSize, [](std::uint8_t b) { return b == 0; }))
    return std::nullopt;
  FrameHeader h = decode_header(slot.data());
  if (h.version != kVersion)
    throw Error(Errc::frame_corrupt, "header version " + std::to_string(h.version));
  if (static_cast<std::uint8_t>(h.mode) > 2)
    throw Error(Errc::frame_corrupt, "mode " + std::to_string(static_cast<unsigned>(h.mode)));
  if (h.flags & ~kFlagPure)
    throw Error(Errc::frame_corrupt, "unknown flag bits");
  if (magic1_offset(h) >= slot.size())
    throw Error(Errc::frame_corrupt, "payload_len " + std::to_string(h.payload_len) + " exceeds slot");
  if (h.mode != Mode::ActiveMessage && magic2_offset(h) >= slot.size())
    throw Error(Errc::frame_corrupt, "code_len " + std::to_string(h.code_len) + " exceeds slot");
  return h;
}

Delivery detect_delivery(ByteSpan slot, bool expect_code) noexcept {
  Delivery d;
  std::optional<FrameHeader> h;
  try {
    h = peek_header(slot);
  } catch (const Error& e) {
    d.state = DeliveryState::Corrupt;
    d.reason = e.what();
    return d;
  }
  if (!h)
    return d;
  std::uint8_t m1 = slot[magic1_offset(*h)];
  if (m1 == 0)
    return d;
  if (m1 != kMagic) {
    d.state = DeliveryState::Corrupt;
    d.reason = "junk at first signal byte";
    return d;
  }
  d.view.header = *h;
  d.view.payload = slot.subspan(kHeaderSize, h->payload_len);
  bool needs_code = expect_code && h->mode != Mode::ActiveMessage;
  if (needs_code) {
    if (h->code_len == 0) {
      d.state = DeliveryState::Corrupt;
      d.reason = "ifunc frame without code";
      return d;
    }
    std::uint8_t m2 = slot[magic2_offset(*h)];
    if (m2 == 0)
      return d;
    if (m2 != kMagic) {
      d.state = DeliveryState::Corrupt;
      d.reason = "junk at trailing signal byte";
      return d;
    }
    d.view.code_section = slot.subspan(magic1_offset(*h) + 1, h->code_len);
  }
  d.state = DeliveryState::Complete;
  return d;
}

FrameView parse_frame(ByteSpan bytes) {
  if (bytes.size() < kHeaderSize + 1)
    throw Error(Errc::truncated, "frame shorter than header + signal byte");
  FrameHeader h = decode_header(bytes.data());
  if (h.version != kVersion || static_cast<std::uint8_t>(h.mode) > 2)
    throw Error(Errc::frame_corrupt, "bad header");
  FrameView v;
  v.header = h;
  if (magic1_offset(h) >= bytes.size())
    throw Error(Errc::truncated, "payload runs past end");
  if (bytes[magic1_offset(h)] != kMagic)
    throw Error(Errc::frame_corrupt, "missing first signal byte");
  v.payload = bytes.subspan(kHeaderSize, h.payload_len);
  if (bytes.size() == truncated_len(h))
    return v;
  if (h.mode == Mode::ActiveMessage || bytes.size() != full_len(h))
    throw Error(Errc::frame_corrupt, "length " + std::to_string(bytes.size()) + " matches neither form");
  if (bytes[magic2_offset(h)] != kMagic)
    throw Error(Errc::frame_corrupt, "missing trailing signal byte");
  v.code_section = bytes.subspan(magic1_offset(h) + 1, h.code_len);
  return v;
}

} // namespace bitchain::wire
