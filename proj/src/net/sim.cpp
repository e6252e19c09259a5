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

#include "bitchain/net/sim.hpp"

#include <algorithm>

namespace bitchain::net {

class SimEndpoint final : public Transport {
public:
  SimEndpoint(SimCluster& cluster, NodeId id) : cluster_(cluster), id_(id) {}

  NodeId self() const override { return id_; }
  std::size_t node_count() const override { return cluster_.size(); }
  const ChannelConfig& channel_config() const override { return cluster_.config_.channel; }

  SendToken put(NodeId dst, ByteSpan bytes) override {
    cluster_.check_node(dst);
    if (dst == id_)
      throw Error(Errc::unknown_endpoint, "node " + std::to_string(id_) + " has no channel to itself");
    const auto& cc = cluster_.config_.channel;
    if (bytes.empty())
      throw Error(Errc::invalid_argument, "zero-byte PUT");
    if (bytes.size() > cc.slot_size)
      throw Error(Errc::oversize, std::to_string(bytes.size()) + " bytes > slot size " + std::to_string(cc.slot_size));
    auto& ch = cluster_.channel(id_, dst);
    if (ch.free == 0 && cc.credit_policy == CreditPolicy::block)
      wait_for_credit(dst);
    if (ch.free == 0)
      throw Error(Errc::no_credit, "channel " + std::to_string(id_) + "->" + std::to_string(dst));

    const auto& cost = cluster_.config_.cost;
    std::uint64_t issue = now_ns();
    std::uint64_t start = std::max(issue, ch.link_free_ns);
    std::uint64_t tx = cost.transfer_ns(bytes.size());
    std::uint64_t deliver = std::max(start + cost.latency_ns + tx + cluster_.jitter(), ch.last_delivery_ns);
    ch.link_free_ns = start + tx;
    ch.last_delivery_ns = deliver;

    std::uint32_t slot = ch.next_put;
    ch.next_put = (ch.next_put + 1) % cc.slots;
    --ch.free;
    ++ch.landing[slot];
    cluster_.schedule(deliver, {TraceEvent::Kind::land, id_, dst, slot, ByteVec(bytes.begin(), bytes.end())});

    ++counters_.puts;
    counters_.put_bytes += bytes.size();
    return {counters_.puts, static_cast<std::uint32_t>(bytes.size()), issue, deliver};
  }

  std::uint32_t credits(NodeId dst) const override {
    cluster_.check_node(dst);
    return dst == id_ ? 0 : cluster_.channel(id_, dst).free;
  }

  void progress() override {}

  ByteSpan head_slot(NodeId src) override {
    cluster_.check_node(src);
    auto& ch = cluster_.channel(src, id_);
    return ch.slots[ch.head];
  }

  bool head_settled(NodeId src) const override {
    const auto& ch = cluster_.channel(src, id_);
    return ch.landing[ch.head] == 0;
  }

  void release_head(NodeId src) override {
    auto& ch = cluster_.channel(src, id_);
    auto& slot = ch.slots[ch.head];
    std::fill(slot.begin(), slot.end(), std::uint8_t{0});
    ch.head = (ch.head + 1) % cluster_.config_.channel.slots;
    if (ch.held > 0)
      --ch.held;
    ++ch.returning;
    cluster_.schedule(now_ns() + cluster_.config_.cost.latency_ns, {TraceEvent::Kind::credit, id_, src, 0, {}});
  }

  ByteVec get(NodeId dst, std::uint64_t remote_off, std::uint32_t len) override {
    cluster_.check_node(dst);
    auto remote = cluster_.endpoints_[dst]->region();
    if (remote_off > remote.size() || len > remote.size() - remote_off)
      throw Error(Errc::remote_bounds, "get [" + std::to_string(remote_off) + ", +" + std::to_string(len) +
                                           ") on node " + std::to_string(dst) + " region of " +
                                           std::to_string(remote.size()));
    ByteVec out(remote.begin() + static_cast<std::ptrdiff_t>(remote_off),
                remote.begin() + static_cast<std::ptrdiff_t>(remote_off + len));
    if (dst != id_) {
      const auto& cost = cluster_.config_.cost;
      std::uint64_t done = now_ns() + 2 * cost.latency_ns + cost.transfer_ns(len);
      cluster_.clocks_[id_] = done;
      cluster_.trace(TraceEvent::Kind::get, done, id_, dst, len);
    }
    ++counters_.gets;
    counters_.get_bytes += len;
    return out;
  }

  void put_region(NodeId dst, ByteSpan bytes, std::uint64_t remote_off) override {
    cluster_.check_node(dst);
    auto remote = cluster_.endpoints_[dst]->region();
    if (remote_off > remote.size() || bytes.size() > remote.size() - remote_off)
      throw Error(Errc::remote_bounds, "put at " + std::to_string(remote_off) + " on node " + std::to_string(dst));
    std::copy(bytes.begin(), bytes.end(), remote.begin() + static_cast<std::ptrdiff_t>(remote_off));
    if (dst != id_) {
      const auto& cost = cluster_.config_.cost;
      auto& ch = cluster_.channel(id_, dst);
      std::uint64_t done = now_ns() + cost.latency_ns + cost.transfer_ns(bytes.size());
      ch.region_write_done_ns = std::max(ch.region_write_done_ns, done);
      cluster_.trace(TraceEvent::Kind::region_put, done, id_, dst, static_cast<std::uint32_t>(bytes.size()));
    }
    ++counters_.region_puts;
    counters_.region_put_bytes += bytes.size();
  }

  void flush(NodeId dst) override {
    cluster_.check_node(dst);
    if (dst == id_)
      return;
    auto& clock = cluster_.clocks_[id_];
    clock = std::max({clock, cluster_.now_, cluster_.channel(id_, dst).region_write_done_ns});
  }

  MutableByteSpan region() override { return region_; }
  void resize_region(std::size_t size) override { region_.assign(size, 0); }

  std::uint64_t now_ns() const override { return cluster_.node_now(id_); }

private:
  // Pulls this channel's earliest pending credit return forward in time.
  void wait_for_credit(NodeId dst) {
    for (auto it = cluster_.events_.begin(); it != cluster_.events_.end(); ++it) {
      const auto& ev = it->second;
      if (ev.kind == TraceEvent::Kind::credit && ev.src == dst && ev.dst == id_) {
        std::uint64_t t = it->first.first;
        cluster_.apply(t, it->second);
        cluster_.events_.erase(it);
        cluster_.clocks_[id_] = std::max(cluster_.clocks_[id_], t);
        return;
      }
    }
  }

  SimCluster& cluster_;
  NodeId id_;
  ByteVec region_;
};

SimCluster::SimCluster(std::size_t nodes, NetConfig config)
    : config_(config), clocks_(nodes, 0), rng_(config.seed) {
  if (nodes == 0)
    throw Error(Errc::invalid_argument, "cluster needs at least one node");
  if (config_.channel.slots == 0 || config_.channel.slot_size == 0 || config_.cost.bandwidth_mbps == 0)
    throw Error(Errc::invalid_argument, "slots, slot size and bandwidth must be positive");
  for (std::size_t i = 0; i < nodes; ++i)
    endpoints_.push_back(std::make_unique<SimEndpoint>(*this, static_cast<NodeId>(i)));
  channels_.resize(nodes * nodes);
  for (auto& ch : channels_) {
    ch.slots.assign(config_.channel.slots, ByteVec(config_.channel.slot_size, 0));
    ch.landing.assign(config_.channel.slots, 0);
    ch.free = config_.channel.slots;
  }
}

SimCluster::~SimCluster() = default;

Transport& SimCluster::transport(NodeId id) {
  check_node(id);
  return *endpoints_[id];
}

void SimCluster::check_node(NodeId id) const {
  if (id >= endpoints_.size())
    throw Error(Errc::unknown_endpoint, "node " + std::to_string(id));
}

std::uint64_t SimCluster::node_now(NodeId id) const noexcept { return std::max(now_, clocks_[id]); }

std::uint64_t SimCluster::jitter() {
  if (config_.cost.jitter_ns == 0)
    return 0;
  return std::uniform_int_distribution<std::uint64_t>(0, config_.cost.jitter_ns)(rng_);
}

void SimCluster::schedule(std::uint64_t time, Event ev) { events_.emplace(EventKey{time, seq_++}, std::move(ev)); }

std::optional<NodeId> SimCluster::step() {
  if (events_.empty())
    return std::nullopt;
  auto it = events_.begin();
  std::uint64_t t = it->first.first;
  Event ev = std::move(it->second);
  events_.erase(it);
  now_ = std::max(now_, t);
  apply(t, ev);
  if (ev.kind == TraceEvent::Kind::land)
    return ev.dst;
  return std::nullopt;
}

void SimCluster::apply(std::uint64_t time, Event& ev) {
  switch (ev.kind) {
  case TraceEvent::Kind::land: {
    auto& ch = channel(ev.src, ev.dst);
    std::copy(ev.bytes.begin(), ev.bytes.end(), ch.slots[ev.slot].begin());
    --ch.landing[ev.slot];
    ++ch.held;
    trace(ev.kind, time, ev.src, ev.dst, static_cast<std::uint32_t>(ev.bytes.size()));
    break;
  }
  case TraceEvent::Kind::credit: {
    // src released a slot of the channel dst -> src.
    auto& ch = channel(ev.dst, ev.src);
    --ch.returning;
    ++ch.free;
    trace(ev.kind, time, ev.src, ev.dst, 0);
    break;
  }
  default: break;
  }
}

void SimCluster::trace(TraceEvent::Kind kind, std::uint64_t time, NodeId src, NodeId dst, std::uint32_t bytes) {
  std::uint8_t rec[1 + 8 + 4 + 4 + 4];
  rec[0] = static_cast<std::uint8_t>(kind);
  store_le<std::uint64_t>(rec + 1, time);
  store_le<std::uint32_t>(rec + 9, src);
  store_le<std::uint32_t>(rec + 13, dst);
  store_le<std::uint32_t>(rec + 17, bytes);
  trace_hash_ = fnv1a64(ByteSpan(rec, sizeof rec), trace_hash_);
  ++trace_count_;
  if (record_)
    trace_.push_back({kind, time, src, dst, bytes});
}

std::uint64_t SimCluster::bytes_on_wire() const noexcept {
  std::uint64_t total = 0;
  for (const auto& ep : endpoints_)
    total += ep->counters().put_bytes;
  return total;
}

CreditAudit SimCluster::audit(NodeId src, NodeId dst) const {
  const auto& ch = channel(src, dst);
  CreditAudit a;
  a.free = ch.free;
  for (auto n : ch.landing)
    a.in_flight += n;
  a.held = ch.held;
  a.returning = ch.returning;
  return a;
}

} // namespace bitchain::net
