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

#include "bitchain/net/transport.hpp"

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace bitchain::net {

struct TraceEvent {
  enum class Kind : std::uint8_t { land, credit, get, region_put };
  Kind kind;
  std::uint64_t time_ns;
  NodeId src;
  NodeId dst;
  std::uint32_t bytes;
};

struct CreditAudit {
  std::uint32_t free = 0;        // held by the sender
  std::uint32_t in_flight = 0;   // PUTs not yet landed
  std::uint32_t held = 0;        // landed, not yet released by the receiver
  std::uint32_t returning = 0;   // credit messages in flight
  std::uint32_t total() const noexcept { return free + in_flight + held + returning; }
};

class SimEndpoint;

/// In-process cluster with a virtual clock. Single-threaded: events are
/// applied one at a time by step(), in (time, issue order). Each node also
/// has a local clock that runs ahead while it is blocked in a GET or flush.
/// Identical configuration and call sequence give identical traces.
class SimCluster {
public:
  SimCluster(std::size_t nodes, NetConfig config);
  ~SimCluster();
  SimCluster(const SimCluster&) = delete;
  SimCluster& operator=(const SimCluster&) = delete;

  Transport& transport(NodeId id);
  std::size_t size() const noexcept { return endpoints_.size(); }
  const NetConfig& config() const noexcept { return config_; }

  /// Applies the next event. Returns the node whose inbound slots changed,
  /// nullopt for other events; idle() tells whether anything was pending.
  std::optional<NodeId> step();
  bool idle() const noexcept { return events_.empty(); }
  std::uint64_t now() const noexcept { return now_; }
  std::uint64_t node_now(NodeId id) const noexcept;

  std::uint64_t trace_hash() const noexcept { return trace_hash_; }
  std::uint64_t trace_events() const noexcept { return trace_count_; }
  void record_trace(bool on) { record_ = on; }
  const std::vector<TraceEvent>& trace() const noexcept { return trace_; }

  /// Sum of PUT bytes over every channel.
  std::uint64_t bytes_on_wire() const noexcept;
  CreditAudit audit(NodeId src, NodeId dst) const;

private:
  friend class SimEndpoint;

  struct Channel {
    std::vector<ByteVec> slots;
    std::vector<std::uint32_t> landing; // PUTs in flight per slot
    std::uint32_t free = 0;
    std::uint32_t held = 0;
    std::uint32_t returning = 0;
    std::uint32_t next_put = 0;
    std::uint32_t head = 0;
    std::uint64_t link_free_ns = 0;
    std::uint64_t last_delivery_ns = 0;
    std::uint64_t region_write_done_ns = 0;
  };

  struct Event {
    TraceEvent::Kind kind;
    NodeId src;
    NodeId dst;
    std::uint32_t slot;
    ByteVec bytes;
  };

  using EventKey = std::pair<std::uint64_t, std::uint64_t>; // time, seq

  Channel& channel(NodeId src, NodeId dst) { return channels_[src * endpoints_.size() + dst]; }
  const Channel& channel(NodeId src, NodeId dst) const { return channels_[src * endpoints_.size() + dst]; }
  void check_node(NodeId id) const;
  void schedule(std::uint64_t time, Event ev);
  void apply(std::uint64_t time, Event& ev);
  void trace(TraceEvent::Kind kind, std::uint64_t time, NodeId src, NodeId dst, std::uint32_t bytes);
  std::uint64_t jitter();

  NetConfig config_;
  std::vector<std::unique_ptr<SimEndpoint>> endpoints_;
  std::vector<Channel> channels_;
  std::vector<std::uint64_t> clocks_;
  std::map<EventKey, Event> events_;
  std::uint64_t now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t trace_hash_ = 14695981039346656037ull;
  std::uint64_t trace_count_ = 0;
  bool record_ = false;
  std::vector<TraceEvent> trace_;
  std::mt19937_64 rng_;
};

} // namespace bitchain::net
