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

#include "bitchain/exec/exec.hpp"
#include "bitchain/net/transport.hpp"
#include "bitchain/pcode/archive.hpp"
#include "bitchain/pcode/compiler.hpp"
#include "bitchain/wire/frame.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace bitchain::node {

/// Handler index reserved for the resend request a receiver sends back when
/// it gets a truncated frame for a type it does not know.
inline constexpr std::uint32_t kNakIndex = 0xFFFFFFFF;

/// BITCHAIN_IFUNC_DIR if set, else the current directory.
std::filesystem::path default_ifunc_dir();

/// Everything a sender needs to ship an ifunc type.
struct Package {
  pcode::FatArchive archive;
  ByteVec archive_bytes;
  std::uint64_t digest = 0;
  std::map<std::string, ByteVec> prelinked; // profile name -> encoded image

  bool pure() const noexcept { return archive.deps.empty(); }
};

struct IfuncHandle {
  std::string name;
  std::uint64_t type_id = 0;
  std::shared_ptr<const Package> package;
};

inline std::uint64_t type_id_of(std::string_view name) noexcept { return fnv1a64(name); }

struct NodeConfig {
  std::string profile = "le64-generic";
  std::filesystem::path ifunc_dir = default_ifunc_dir();
  pcode::CapabilityRegistry capabilities = pcode::CapabilityRegistry::all();
  std::uint64_t fuel = exec::kDefaultFuel;
  // When off every ifunc send carries its code section.
  bool caching = true;
};

struct NodeCounters {
  std::uint64_t full_sends = 0;
  std::uint64_t truncated_sends = 0;
  std::uint64_t am_sends = 0;
  std::uint64_t wire_bytes = 0;
  std::uint64_t executions = 0;
  std::uint64_t am_dispatches = 0;
  std::uint64_t traps = 0;
  std::uint64_t auto_registrations = 0;
  std::uint64_t corrupt_frames = 0;
  std::uint64_t variant_mismatches = 0;
  std::uint64_t dispatch_errors = 0;
  std::uint64_t naks_sent = 0;
  std::uint64_t naks_received = 0;
  std::uint64_t resends = 0;
};

/// One handled message, reported through Node::on_execute. Active messages
/// report type_id 0, their handler index and an empty status.
struct ExecRecord {
  std::uint64_t type_id = 0;
  std::uint32_t am_index = 0;
  net::NodeId src = 0;
  wire::Mode mode = wire::Mode::Portable;
  exec::ExitStatus status;
  std::uint64_t started_ns = 0;  // transport clock
  std::uint64_t compile_ns = 0;  // wall time spent compiling or loading, 0 when cached
  std::uint64_t handle_ns = 0;   // wall time of lookup + execute, compile excluded
  ByteSpan payload;              // valid during the callback only
};

struct AmMessage {
  net::NodeId src;
  ByteSpan payload;
};

class Node;
using AmHandler = std::function<void(Node&, const AmMessage&)>;

/// Per-node runtime: registration, cache-aware sends, and the polling
/// receive path with auto-registration. Single-threaded; call from one
/// thread at a time.
class Node : private exec::HostServices {
public:
  Node(net::Transport& transport, NodeConfig config = {});
  ~Node() override;
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  net::NodeId id() const noexcept { return transport_.self(); }
  const pcode::TargetProfile& profile() const noexcept { return profile_; }
  net::Transport& transport() noexcept { return transport_; }
  MutableByteSpan region() { return transport_.region(); }
  NodeConfig& config() noexcept { return config_; }

  /// Loads <dir>/<name>.pbca and any <name>.pbin.<profile> next to it.
  IfuncHandle register_ifunc(const std::string& name);
  IfuncHandle register_ifunc(const std::string& name, const std::filesystem::path& dir);
  /// Registers from bytes already in memory.
  IfuncHandle register_archive(const std::string& name, ByteSpan archive_bytes,
                               std::map<std::string, ByteVec> prelinked = {});
  /// Drops the compiled entry, the received code and every sent-set entry
  /// for the type. Unknown types are ignored.
  void deregister_ifunc(std::uint64_t type_id);
  void deregister_ifunc(const IfuncHandle& h) { deregister_ifunc(h.type_id); }

  /// Builds the full frame. Mode Prelinked uses the image for target_profile
  /// (default: this node's profile).
  wire::MessageFrame create_message(const IfuncHandle& h, ByteSpan payload, wire::Mode mode,
                                    const std::string& target_profile = {}) const;
  /// One transport PUT: the full frame on first use of (type, endpoint),
  /// the truncated prefix afterwards.
  net::SendToken send_ifunc(net::NodeId endpoint, const wire::MessageFrame& frame);

  void am_register(std::uint32_t index, AmHandler handler);
  net::SendToken am_send(net::NodeId endpoint, std::uint32_t index, ByteSpan payload);

  /// Handles up to max_events delivered messages; returns how many.
  std::size_t poll(std::size_t max_events = 64);

  ByteVec get(net::NodeId endpoint, std::uint64_t remote_off, std::uint32_t len);
  void put(net::NodeId endpoint, ByteSpan bytes, std::uint64_t remote_off);
  void flush(net::NodeId endpoint);

  bool known(std::uint64_t type_id) const { return types_.count(type_id) > 0; }
  bool sent_to(std::uint64_t type_id, net::NodeId endpoint) const { return sent_.count({type_id, endpoint}) > 0; }
  /// Compiles of type_id over the node's lifetime, deregistrations included.
  std::uint64_t compile_count(std::uint64_t type_id) const;
  std::uint64_t prelinked_load_count(std::uint64_t type_id) const;
  const NodeCounters& counters() const noexcept { return counters_; }
  const exec::HostcallCounters& hostcalls() const noexcept { return env_->counters; }

  std::function<void(const ExecRecord&)> on_execute;

private:
  struct TypeEntry {
    std::string name;
    std::shared_ptr<const Package> package;
    wire::Mode received_mode = wire::Mode::Portable;
    ByteVec side_buffer;
    std::shared_ptr<const pcode::CompiledFunction> fn;
    std::uint64_t registered_ns = 0;
    bool pure = false;
  };

  // HostServices
  void send_self(std::uint64_t dest_node, ByteSpan payload) override;
  void send(std::uint64_t type_id, std::uint64_t dest_node, ByteSpan payload) override;
  ByteVec mem_get(std::uint64_t node, std::uint64_t remote_off, std::uint64_t len) override;
  void mem_put(std::uint64_t node, ByteSpan bytes, std::uint64_t remote_off) override;

  void sync_epoch(net::NodeId endpoint);
  wire::MessageFrame frame_for(std::uint64_t type_id, ByteSpan payload, wire::Mode mode) const;
  bool handle_slot(net::NodeId src);
  void drop_slot(net::NodeId src, const std::string& why);
  void send_nak(net::NodeId dst, std::uint64_t type_id);
  void on_nak(net::NodeId src, ByteSpan payload);
  void auto_register(const wire::FrameView& view);
  std::uint64_t ensure_compiled(TypeEntry& entry, std::uint64_t type_id, wire::Mode mode);
  void run(std::uint64_t type_id, TypeEntry& entry, const wire::FrameView& view, net::NodeId src,
           std::uint64_t compile_ns, std::uint64_t started_ns, std::chrono::steady_clock::time_point lookup_start);

  net::Transport& transport_;
  NodeConfig config_;
  pcode::TargetProfile profile_;
  std::map<std::uint64_t, TypeEntry> types_;
  std::set<std::pair<std::uint64_t, net::NodeId>> sent_;
  std::map<std::pair<std::uint64_t, net::NodeId>, wire::MessageFrame> last_frame_;
  std::vector<std::uint64_t> epochs_;
  std::map<std::uint32_t, AmHandler> am_;
  std::map<std::uint64_t, std::uint64_t> compiles_;
  std::map<std::uint64_t, std::uint64_t> loads_;
  std::unique_ptr<exec::HostEnv> env_;
  wire::Mode current_mode_ = wire::Mode::Portable;
  NodeCounters counters_;
  std::size_t next_src_ = 0;
  bool log_ = false;
};

} // namespace bitchain::node
