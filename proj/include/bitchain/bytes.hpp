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

#include "bitchain/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bitchain {

using ByteVec = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;
using MutableByteSpan = std::span<std::uint8_t>;

namespace detail {

template <typename T>
constexpr T bswap(T v) noexcept {
  if constexpr (sizeof(T) == 1)
    return v;
  else if constexpr (sizeof(T) == 2)
    return static_cast<T>(__builtin_bswap16(static_cast<std::uint16_t>(v)));
  else if constexpr (sizeof(T) == 4)
    return static_cast<T>(__builtin_bswap32(static_cast<std::uint32_t>(v)));
  else
    return static_cast<T>(__builtin_bswap64(static_cast<std::uint64_t>(v)));
}

template <typename T, std::endian E>
inline T load(const std::uint8_t* p) noexcept {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return E == std::endian::native ? v : bswap(v);
}

template <typename T, std::endian E>
inline void store(std::uint8_t* p, T v) noexcept {
  if constexpr (E != std::endian::native)
    v = bswap(v);
  std::memcpy(p, &v, sizeof(T));
}

} // namespace detail

template <typename T>
inline T load_le(const std::uint8_t* p) noexcept { return detail::load<T, std::endian::little>(p); }

template <typename T>
inline void store_le(std::uint8_t* p, T v) noexcept { detail::store<T, std::endian::little>(p, v); }

template <typename T>
inline T load_be(const std::uint8_t* p) noexcept { return detail::load<T, std::endian::big>(p); }

template <typename T>
inline void store_be(std::uint8_t* p, T v) noexcept { detail::store<T, std::endian::big>(p, v); }

/// 64-bit FNV-1a. Used for ifunc type ids and content digests.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(ByteSpan bytes, std::uint64_t h = 14695981039346656037ull) noexcept {
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

/// Append-only little-endian encoder.
class ByteWriter {
public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put_le(v); }
  void u32(std::uint32_t v) { put_le(v); }
  void u64(std::uint64_t v) { put_le(v); }
  void bytes(ByteSpan b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  // u8 length prefix followed by the raw characters.
  void short_string(std::string_view s) {
    if (s.size() > 255)
      throw Error(Errc::length_overflow, "string longer than 255 bytes: " + std::string(s.substr(0, 32)));
    u8(static_cast<std::uint8_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  std::size_t size() const noexcept { return buf_.size(); }
  ByteVec take() && { return std::move(buf_); }
  const ByteVec& data() const noexcept { return buf_; }

private:
  template <typename T>
  void put_le(T v) {
    std::uint8_t tmp[sizeof(T)];
    store_le(tmp, v);
    buf_.insert(buf_.end(), tmp, tmp + sizeof(T));
  }

  ByteVec buf_;
};

/// Bounds-checked little-endian decoder. Every read past the end throws
/// Errc::truncated; nothing reads outside the span.
class ByteReader {
public:
  explicit ByteReader(ByteSpan data) noexcept : data_(data) {}

  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }

  ByteSpan bytes(std::size_t n) {
    need(n);
    ByteSpan out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::string short_string() {
    std::size_t n = u8();
    ByteSpan raw = bytes(n);
    return std::string(raw.begin(), raw.end());
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool done() const noexcept { return pos_ == data_.size(); }

private:
  void need(std::size_t n) const {
    if (n > remaining())
      throw Error(Errc::truncated, "need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_) +
                                       ", have " + std::to_string(remaining()));
  }

  template <typename T>
  T get() {
    need(sizeof(T));
    T v = load_le<T>(data_.data() + pos_);
    pos_ += sizeof(T);
    return v;
  }

  ByteSpan data_;
  std::size_t pos_ = 0;
};

} // namespace bitchain
