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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bitchain::net {

using NodeId = std::uint32_t;

enum class CreditPolicy { error, block };

struct ChannelConfig {
  std::uint32_t slots = 16;
  std::uint32_t slot_size = 8192;
  CreditPolicy credit_policy = CreditPolicy::error;
};

/// Delivery of an n-byte PUT on an idle link completes at
/// issue + latency_ns + ceil(n / bandwidth). Bandwidth is kept in Mb/s so the
/// arithmetic stays integral: 100 Gb/s = 12.5 B/ns = 100000 Mb/s.
struct CostModel {
  std::uint64_t latency_ns = 1000;
  std::uint64_t bandwidth_mbps = 100'000;
  std::uint64_t jitter_ns = 0;

  std::uint64_t transfer_ns(std::uint64_t bytes) const noexcept {
    return (bytes * 8000 + bandwidth_mbps - 1) / bandwidth_mbps;
  }
};

struct NetConfig {
  ChannelConfig channel;
  CostModel cost;
  std::uint64_t seed = 1;
  std::uint32_t connect_timeout_ms = 10'000;
  std::uint32_t io_timeout_ms = 10'000;

  /// key=value lines, '#' comments. Keys: slots, slot_size, credit_policy
  /// (error|block), latency_ns, bandwidth_gbps, jitter_ns, seed,
  /// connect_timeout_ms, io_timeout_ms. Unknown keys are an error.
  static NetConfig parse(std::string_view text);
  static NetConfig load(const std::filesystem::path& path);
};

struct SendToken {
  std::uint64_t seq = 0;
  std::uint32_t bytes = 0;
  std::uint64_t issued_ns = 0;
  // Modeled completion time; equal to issued_ns on wall-clock transports.
  std::uint64_t completes_ns = 0;
};

struct TransportCounters {
  std::uint64_t puts = 0;
  std::uint64_t put_bytes = 0;
  std::uint64_t gets = 0;
  std::uint64_t get_bytes = 0;
  std::uint64_t region_puts = 0;
  std::uint64_t region_put_bytes = 0;
  std::uint64_t corrupt_channels = 0;
};

/// One node's view of a one-sided fabric. Outbound PUTs land in per-channel
/// rings of zero-filled slots on the receiver; a PUT needs a credit, which the
/// receiver returns after releasing the slot. Inbound slots are inspected in
/// ring order per source. All methods are called from the owning node's
/// thread; transports never call back into user code.
class Transport {
public:
  virtual ~Transport() = default;

  virtual NodeId self() const = 0;
  virtual std::size_t node_count() const = 0;
  virtual const ChannelConfig& channel_config() const = 0;

  /// Writes bytes into the next slot of the channel to dst. Throws
  /// Errc::oversize, Errc::no_credit, Errc::unknown_endpoint,
  /// Errc::endpoint_down, Errc::invalid_argument (empty PUT).
  virtual SendToken put(NodeId dst, ByteSpan bytes) = 0;
  virtual std::uint32_t credits(NodeId dst) const = 0;

  /// Moves transport-side work forward (landing bytes, serving GETs).
  virtual void progress() = 0;

  /// Head slot of the inbound ring from src.
  virtual ByteSpan head_slot(NodeId src) = 0;
  /// True when no bytes are still in flight toward the head slot.
  virtual bool head_settled(NodeId src) const = 0;
  /// Zero-fills the head slot, advances the ring and returns the credit.
  virtual void release_head(NodeId src) = 0;

  /// Blocking one-sided read of dst's region. Throws Errc::remote_bounds.
  virtual ByteVec get(NodeId dst, std::uint64_t remote_off, std::uint32_t len) = 0;
  virtual void put_region(NodeId dst, ByteSpan bytes, std::uint64_t remote_off) = 0;
  /// Returns once every earlier put_region to dst is visible there.
  virtual void flush(NodeId dst) = 0;

  virtual MutableByteSpan region() = 0;
  virtual void resize_region(std::size_t size) = 0;

  virtual std::uint64_t now_ns() const = 0;

  /// Changes whenever the connection to peer is re-established.
  virtual std::uint64_t epoch(NodeId peer) const { return (void)peer, 0; }

  /// Opens the channel to dst now if the transport connects lazily.
  virtual void connect(NodeId dst) { (void)dst; }

  /// Sleeps until inbound activity or the timeout. No-op on virtual time.
  virtual void wait_activity(std::uint32_t timeout_us) { (void)timeout_us; }

  const TransportCounters& counters() const noexcept { return counters_; }

protected:
  TransportCounters counters_;
};

} // namespace bitchain::net
