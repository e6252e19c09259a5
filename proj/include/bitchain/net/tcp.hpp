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

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bitchain::net {

/// "host:port" of every node, indexed by node id.
using PeerList = std::vector<std::string>;

/// Asks the kernel for n currently unused localhost ports.
std::vector<std::uint16_t> reserve_ports(std::size_t n);

/// Slot/credit contract emulated over TCP streams. Every node listens on its
/// own address and opens one outbound stream per peer; the initiator writes
/// PUTs, GETs and region writes, the acceptor answers with credits and GET
/// responses on the same stream.
///
/// Stream messages (little-endian):
///   'H' u32 src "BTCH"                  hello, first on every stream
///   'P' u32 slot u32 len bytes          PUT into a slot
///   'C' u32 slot                        credit return
///   0x47 u32 req u64 off u32 len        GET request
///   0x72 u32 req u8 status u32 len bytes GET response
///   'W' u64 off u32 len bytes           region write
///   'F' u32 id / 'f' u32 id u8 status   flush and its acknowledgement
///
/// Reader threads only decode into an inbox; all state changes happen on the
/// owner's thread inside progress(). A malformed stream closes that channel
/// and is counted; the transport keeps serving other peers.
class TcpTransport final : public Transport {
public:
  TcpTransport(NodeId self, PeerList peers, NetConfig config = {});
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  NodeId self() const override { return self_; }
  std::size_t node_count() const override { return peers_.size(); }
  const ChannelConfig& channel_config() const override { return config_.channel; }

  SendToken put(NodeId dst, ByteSpan bytes) override;
  std::uint32_t credits(NodeId dst) const override;
  void progress() override;

  ByteSpan head_slot(NodeId src) override;
  bool head_settled(NodeId) const override { return true; }
  void release_head(NodeId src) override;

  ByteVec get(NodeId dst, std::uint64_t remote_off, std::uint32_t len) override;
  void put_region(NodeId dst, ByteSpan bytes, std::uint64_t remote_off) override;
  void flush(NodeId dst) override;

  MutableByteSpan region() override { return region_; }
  void resize_region(std::size_t size) override { region_.assign(size, 0); }

  std::uint64_t now_ns() const override;
  std::uint64_t epoch(NodeId peer) const override;
  void connect(NodeId dst) override;
  void wait_activity(std::uint32_t timeout_us) override;

  /// True while an inbound stream from src is open.
  bool peer_connected(NodeId src) const;
  /// Description of the most recent stream fault, empty if none.
  const std::string& last_fault() const noexcept { return last_fault_; }

private:
  struct Conn;
  struct Event;
  struct Outbound {
    std::shared_ptr<Conn> conn;
    std::uint32_t credits = 0;
    std::uint32_t next_slot = 0;
    std::uint64_t epoch = 0;
  };
  struct Inbound {
    std::shared_ptr<Conn> conn;
    std::vector<ByteVec> slots;
    std::vector<bool> filled;
    std::uint32_t head = 0;
  };

  void check_peer(NodeId id) const;
  Outbound& connected(NodeId dst);
  void accept_loop();
  void read_loop(std::shared_ptr<Conn> conn);
  void push(Event ev);
  void handle(Event& ev);
  void fault(NodeId peer, const std::string& why);
  void send_on(const std::shared_ptr<Conn>& conn, ByteSpan bytes);
  template <typename Pred>
  void await(NodeId dst, Pred done, const char* what);

  NodeId self_;
  PeerList peers_;
  NetConfig config_;
  int listen_fd_ = -1;
  std::chrono::steady_clock::time_point start_;
  ByteVec region_;
  std::vector<Outbound> out_;
  std::vector<Inbound> in_;
  std::uint64_t next_conn_id_ = 1;
  std::uint32_t next_req_ = 1;
  std::map<std::uint32_t, std::pair<std::uint8_t, ByteVec>> responses_;
  std::map<std::uint32_t, std::uint8_t> flush_acks_;
  std::string last_fault_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Event> inbox_;
  std::vector<std::shared_ptr<Conn>> conns_; // every stream ever opened, guarded by mu_
  std::vector<std::thread> threads_;          // guarded by mu_
  std::thread acceptor_;
  bool stopping_ = false;
};

} // namespace bitchain::net
