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

#include "bitchain/node/node.hpp"
#include "bitchain/wire/frame.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bitchain;
using namespace bitchain::wire;
using bitchain::test::read_file;
using bitchain::test::vector_dir;

namespace {

ByteVec random_bytes(std::mt19937_64& rng, std::size_t n) {
  ByteVec v(n);
  for (auto& b : v)
    b = static_cast<std::uint8_t>(rng());
  return v;
}

struct RandomFrame {
  FrameHeader h;
  ByteVec payload;
  ByteVec code;
};

RandomFrame random_frame(std::mt19937_64& rng) {
  RandomFrame f;
  f.h.mode = static_cast<Mode>(rng() % 3);
  f.h.type_id = rng();
  f.h.flags = static_cast<std::uint8_t>(rng() & kFlagPure);
  f.h.src_node = static_cast<std::uint32_t>(rng());
  f.payload = random_bytes(rng, rng() % 200);
  f.h.payload_len = static_cast<std::uint32_t>(f.payload.size());
  if (f.h.mode == Mode::ActiveMessage) {
    f.h.code_len = static_cast<std::uint32_t>(rng() % 16);
  } else {
    f.code = random_bytes(rng, 1 + rng() % 300);
    f.h.code_len = static_cast<std::uint32_t>(f.code.size());
  }
  return f;
}

} // namespace

TEST(Golden, TsiFrameMatchesVector) {
  ByteVec code = read_file(vector_dir() / "tsi.pbca");
  ASSERT_EQ(code.size(), 5159u);
  FrameHeader h;
  h.type_id = node::type_id_of("tsi");
  h.mode = Mode::Portable;
  h.flags = kFlagPure;
  h.src_node = 1;
  h.payload_len = 1;
  h.code_len = static_cast<std::uint32_t>(code.size());
  ByteVec payload{0};
  MessageFrame f(h, payload, code);
  ByteVec full = read_file(vector_dir() / "frame_tsi_full.bin");
  EXPECT_EQ(f.full_len(), 5188u);
  EXPECT_EQ(ByteVec(f.bytes().begin(), f.bytes().end()), full);
  ByteVec trunc = read_file(vector_dir() / "frame_tsi_truncated.bin");
  EXPECT_EQ(f.truncated_len(), 28u);
  EXPECT_EQ(ByteVec(f.truncated().begin(), f.truncated().end()), trunc);
}

TEST(Golden, ActiveMessageFrames) {
  FrameHeader h;
  h.mode = Mode::ActiveMessage;
  h.src_node = 1;
  h.payload_len = 1;
  h.code_len = 3;
  ByteVec am = encode_frame(h, ByteVec{1}, {});
  EXPECT_EQ(am.size(), 28u);
  EXPECT_EQ(am, read_file(vector_dir() / "frame_am.bin"));
  FrameHeader e;
  e.mode = Mode::ActiveMessage;
  ByteVec empty = encode_frame(e, {}, {});
  EXPECT_EQ(empty.size(), 27u);
  EXPECT_EQ(empty, read_file(vector_dir() / "frame_am_empty.bin"));
  EXPECT_EQ(truncated_len(e), 27u);
}

TEST(Golden, BinaryFrameWithSentinelBytesInPayload) {
  ByteVec bytes = read_file(vector_dir() / "frame_binary.bin");
  FrameView v = parse_frame(bytes);
  EXPECT_EQ(v.header.type_id, node::type_id_of("vec"));
  EXPECT_EQ(v.header.mode, Mode::Prelinked);
  EXPECT_EQ(v.header.src_node, 7u);
  EXPECT_EQ(ByteVec(v.payload.begin(), v.payload.end()), (ByteVec{0xA5, 0x00, 0xA5, 0x10, 0xFF}));
  EXPECT_EQ(std::string(v.code_section.begin(), v.code_section.end()), "CODE");
  ByteVec again = encode_frame(v.header, v.payload, v.code_section);
  EXPECT_EQ(again, bytes);
}

TEST(Golden, TypeIds) {
  ByteVec raw = read_file(vector_dir() / "type_ids.bin");
  std::size_t pos = 0, seen = 0;
  while (pos < raw.size()) {
    std::size_t len = raw[pos++];
    std::string name(raw.begin() + static_cast<std::ptrdiff_t>(pos), raw.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
    std::uint64_t want = load_le<std::uint64_t>(raw.data() + pos);
    pos += 8;
    EXPECT_EQ(node::type_id_of(name), want) << '"' << name << '"';
    ++seen;
  }
  EXPECT_EQ(seen, 6u);
}

TEST(Header, LayoutIsLittleEndian) {
  FrameHeader h;
  h.type_id = 0x0102030405060708ull;
  h.mode = Mode::Prelinked;
  h.flags = 1;
  h.src_node = 0xAABBCCDD;
  h.payload_len = 0x11223344;
  h.code_len = 0x55667788;
  std::uint8_t buf[kHeaderSize];
  encode_header(h, buf);
  const std::uint8_t want[kHeaderSize] = {1,    0,    0,    0,    8,    7,    6,    5,    4,
                                          3,    2,    1,    1,    1,    0xDD, 0xCC, 0xBB, 0xAA,
                                          0x44, 0x33, 0x22, 0x11, 0x88, 0x77, 0x66, 0x55};
  EXPECT_TRUE(std::equal(buf, buf + kHeaderSize, want));
  EXPECT_EQ(decode_header(buf), h);
}

TEST(Frame, Lengths) {
  FrameHeader h;
  h.payload_len = 1;
  h.code_len = 5159;
  EXPECT_EQ(full_len(h), 5188u);
  EXPECT_EQ(truncated_len(h), 28u);
  h.payload_len = 0;
  EXPECT_EQ(truncated_len(h), 27u);
}

TEST(Frame, PrefixLawOverRandomFrames) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    RandomFrame r = random_frame(rng);
    MessageFrame f(r.h, r.payload, r.code);
    ASSERT_EQ(f.truncated_len(), kHeaderSize + r.payload.size() + 1);
    ASSERT_LE(f.truncated_len(), f.full_len());
    ASSERT_TRUE(std::equal(f.truncated().begin(), f.truncated().end(), f.bytes().begin()));
    if (r.h.mode != Mode::ActiveMessage) {
      ASSERT_EQ(f.full_len(), kHeaderSize + r.payload.size() + 2 + r.code.size());
      ASSERT_LT(f.truncated_len(), f.full_len());
    }
  }
}

TEST(Frame, RoundTripRandom) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    RandomFrame r = random_frame(rng);
    ByteVec bytes = encode_frame(r.h, r.payload, r.code);
    EXPECT_EQ(encode_frame(r.h, r.payload, r.code), bytes);
    FrameView v = parse_frame(bytes);
    ASSERT_EQ(v.header, r.h);
    ASSERT_EQ(ByteVec(v.payload.begin(), v.payload.end()), r.payload);
    ASSERT_EQ(ByteVec(v.code_section.begin(), v.code_section.end()), r.code);
    FrameView t = parse_frame(ByteSpan(bytes).first(truncated_len(r.h)));
    ASSERT_EQ(t.header, r.h);
    ASSERT_TRUE(t.code_section.empty());
  }
}

TEST(Frame, CopiesShareBytes) {
  FrameHeader h;
  h.payload_len = 2;
  h.code_len = 3;
  MessageFrame a(h, ByteVec{1, 2}, ByteVec{7, 8, 9});
  MessageFrame b = a;
  EXPECT_EQ(a.bytes().data(), b.bytes().data());
  EXPECT_EQ(ByteVec(a.code_section().begin(), a.code_section().end()), (ByteVec{7, 8, 9}));
  EXPECT_EQ(ByteVec(a.payload().begin(), a.payload().end()), (ByteVec{1, 2}));
  EXPECT_FALSE(MessageFrame().valid());
}

TEST(Frame, EncodeRejectsInconsistentInput) {
  FrameHeader h;
  h.payload_len = 2;
  h.code_len = 1;
  EXPECT_ERRC(encode_frame(h, ByteVec{1}, ByteVec{1}), Errc::invalid_argument);
  EXPECT_ERRC(encode_frame(h, ByteVec{1, 2}, ByteVec{1, 2}), Errc::invalid_argument);
  h.code_len = 0;
  EXPECT_ERRC(encode_frame(h, ByteVec{1, 2}, {}), Errc::invalid_argument);
  FrameHeader am;
  am.mode = Mode::ActiveMessage;
  EXPECT_ERRC(encode_frame(am, {}, ByteVec{1}), Errc::invalid_argument);
  FrameHeader bad;
  bad.mode = static_cast<Mode>(3);
  bad.code_len = 1;
  EXPECT_ERRC(encode_frame(bad, {}, ByteVec{1}), Errc::invalid_argument);
  FrameHeader v2;
  v2.version = 2;
  v2.code_len = 1;
  EXPECT_ERRC(encode_frame(v2, {}, ByteVec{1}), Errc::invalid_argument);
}

TEST(Frame, ParseRejectsDamage) {
  FrameHeader h;
  h.payload_len = 2;
  h.code_len = 3;
  ByteVec good = encode_frame(h, ByteVec{1, 2}, ByteVec{7, 8, 9});
  EXPECT_ERRC(parse_frame(ByteSpan(good).first(10)), Errc::truncated);
  EXPECT_ERRC(parse_frame(ByteSpan(good).first(28)), Errc::truncated);
  EXPECT_ERRC(parse_frame(ByteSpan(good).first(30)), Errc::frame_corrupt);
  ByteVec m = good;
  m.back() = 0;
  EXPECT_ERRC(parse_frame(m), Errc::frame_corrupt);
  m = good;
  m[28] = 0x5A;
  EXPECT_ERRC(parse_frame(m), Errc::frame_corrupt);
  m = good;
  m[12] = 9;
  EXPECT_ERRC(parse_frame(m), Errc::frame_corrupt);
  m = good;
  m.push_back(0);
  EXPECT_ERRC(parse_frame(m), Errc::frame_corrupt);
}

TEST(Detect, ZeroSlotIsNotYet) {
  ByteVec slot(64, 0);
  EXPECT_EQ(detect_delivery(slot, true).state, DeliveryState::NotYet);
  EXPECT_EQ(detect_delivery(slot, false).state, DeliveryState::NotYet);
  EXPECT_FALSE(peek_header(slot).has_value());
}

TEST(Detect, FullTsiFrameCompletes) {
  ByteVec full = read_file(vector_dir() / "frame_tsi_full.bin");
  ByteVec slot(8192, 0);
  std::copy(full.begin(), full.end(), slot.begin());
  Delivery d = detect_delivery(slot, true);
  ASSERT_EQ(d.state, DeliveryState::Complete) << d.reason;
  EXPECT_EQ(d.view.code_section.size(), 5159u);
  EXPECT_EQ(d.view.payload.size(), 1u);
}

TEST(Detect, CodeNotYetWrittenIsNotYet) {
  ByteVec full = read_file(vector_dir() / "frame_tsi_full.bin");
  ByteVec slot(8192, 0);
  std::copy(full.begin(), full.begin() + 28, slot.begin());
  EXPECT_EQ(detect_delivery(slot, true).state, DeliveryState::NotYet);
  Delivery t = detect_delivery(slot, false);
  EXPECT_EQ(t.state, DeliveryState::Complete);
  EXPECT_TRUE(t.view.code_section.empty());
}

TEST(Detect, InOrderWritesCompleteOnlyAtTheEnd) {
  // Payload full of sentinel bytes must not complete early.
  FrameHeader h;
  h.mode = Mode::Prelinked;
  h.payload_len = 40;
  h.code_len = 20;
  ByteVec payload(40, kMagic), code(20, kMagic);
  ByteVec bytes = encode_frame(h, payload, code);
  for (bool expect : {true, false}) {
    ByteVec slot(128, 0);
    const std::size_t done_at = expect ? bytes.size() : truncated_len(h);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      slot[i] = bytes[i];
      Delivery d = detect_delivery(slot, expect);
      ASSERT_NE(d.state, DeliveryState::Corrupt) << i << ' ' << d.reason;
      ASSERT_EQ(d.state == DeliveryState::Complete, i + 1 >= done_at) << "byte " << i;
    }
  }
}

TEST(Detect, ActiveMessageIgnoresExpectCode) {
  ByteVec am = read_file(vector_dir() / "frame_am.bin");
  ByteVec slot(64, 0);
  std::copy(am.begin(), am.end(), slot.begin());
  Delivery d = detect_delivery(slot, true);
  ASSERT_EQ(d.state, DeliveryState::Complete);
  EXPECT_EQ(d.view.header.am_index(), 3u);
}

TEST(Detect, MalformedHeadersAreCorrupt) {
  FrameHeader h;
  h.payload_len = 4;
  h.code_len = 4;
  ByteVec bytes = encode_frame(h, ByteVec(4, 1), ByteVec(4, 2));
  auto corrupt = [&](auto mutate, std::size_t slot_size = 64) {
    ByteVec slot(slot_size, 0);
    std::copy_n(bytes.begin(), std::min(bytes.size(), slot.size()), slot.begin());
    mutate(slot);
    return detect_delivery(slot, true).state == DeliveryState::Corrupt;
  };
  EXPECT_TRUE(corrupt([](ByteVec& s) { s[0] = 2; }));
  EXPECT_TRUE(corrupt([](ByteVec& s) { s[12] = 3; }));
  EXPECT_TRUE(corrupt([](ByteVec& s) { s[13] = 0x80; }));
  EXPECT_TRUE(corrupt([](ByteVec& s) { s[30] = 0x11; }));
  EXPECT_TRUE(corrupt([](ByteVec& s) { s[35] = 0x11; }));
  EXPECT_TRUE(corrupt([](ByteVec& s) { store_le<std::uint32_t>(s.data() + 18, 1000); }));
  EXPECT_TRUE(corrupt([](ByteVec& s) { store_le<std::uint32_t>(s.data() + 22, 0xFFFFFFFF); }));
  // Frame exactly fills the slot.
  EXPECT_FALSE(corrupt([](ByteVec&) {}, bytes.size()));
  EXPECT_TRUE(corrupt([](ByteVec&) {}, bytes.size() - 1));
  ByteVec small(10, 1);
  EXPECT_EQ(detect_delivery(small, false).state, DeliveryState::Corrupt);
  EXPECT_ERRC(peek_header(small), Errc::frame_corrupt);
}

TEST(Detect, FuzzNeverCrashes) {
  std::mt19937_64 rng(99);
  std::size_t complete = 0;
  for (int i = 0; i < 100000; ++i) {
    ByteVec slot;
    if (i % 2) {
      slot = random_bytes(rng, rng() % 96);
    } else {
      RandomFrame r = random_frame(rng);
      slot = encode_frame(r.h, r.payload, r.code);
      slot.resize(slot.size() + rng() % 8, 0);
      for (int k = static_cast<int>(rng() % 4); k > 0; --k)
        slot[rng() % slot.size()] = static_cast<std::uint8_t>(rng());
      slot.resize(rng() % (slot.size() + 1));
    }
    // Exact-size heap buffer so sanitizers catch overreads.
    auto buf = std::make_unique<std::uint8_t[]>(slot.size() + 1);
    std::copy(slot.begin(), slot.end(), buf.get());
    ByteSpan s(buf.get(), slot.size());
    for (bool expect : {true, false}) {
      Delivery d = detect_delivery(s, expect);
      if (d.state == DeliveryState::Complete) {
        ++complete;
        ASSERT_EQ(s[magic1_offset(d.view.header)], kMagic);
        if (expect && d.view.header.mode != Mode::ActiveMessage)
          ASSERT_EQ(s[magic2_offset(d.view.header)], kMagic);
      }
    }
    try {
      FrameView v = parse_frame(s);
      ASSERT_LE(kHeaderSize + v.payload.size(), s.size());
    } catch (const Error&) {
    }
  }
  EXPECT_GT(complete, 0u);
}
