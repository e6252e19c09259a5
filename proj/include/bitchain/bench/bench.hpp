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

#include "bitchain/bench/fabric.hpp"
#include "bitchain/bench/table.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bitchain::bench {

enum class Mode { am, binary, bitcode };

std::string_view to_string(Mode m) noexcept;
Mode parse_mode(std::string_view s);
wire::Mode wire_mode(Mode m);

// Active-message handler indices used by the harness.
namespace am {
inline constexpr std::uint32_t kChase = 1;
inline constexpr std::uint32_t kResult = 2;
inline constexpr std::uint32_t kIncrement = 3;
inline constexpr std::uint32_t kAck = 4;
inline constexpr std::uint32_t kShutdown = 5;
} // namespace am

// Client region: completion counter and last delivered result.
namespace client_layout {
inline constexpr std::size_t kCounter = 32;
inline constexpr std::size_t kResult = 40;
inline constexpr std::size_t kSize = 48;
} // namespace client_layout

/// Where a DAPC server keeps its running forward count.
inline constexpr std::size_t kForwardCounter = exec::layout::kReserved;
/// Region offset of the TSI counter.
inline constexpr std::size_t kTsiCounter = 32;

/// Settings shared by every run.
struct RunEnv {
  net::NetConfig net;
  std::filesystem::path ifunc_dir = node::default_ifunc_dir();
  /// Profile per node, assigned round-robin; empty means le64-generic.
  std::vector<std::string> profiles;
  bool sender_caching = true;

  node::NodeConfig node_config(net::NodeId id) const;
  std::vector<node::NodeConfig> node_configs(std::size_t n) const;
};

// Node setup, shared by the simulated fabric and the TCP server role.
void setup_dapc_server(node::Node& n, const PointerTable& table);
void setup_dapc_client(node::Node& n);
void setup_tsi_server(node::Node& n);
void setup_tsi_client(node::Node& n);
/// Handles am::kShutdown by setting *stop.
void install_shutdown(node::Node& n, bool* stop);

struct TsiConfig {
  Mode mode = Mode::bitcode;
  std::uint64_t latency_iterations = 1000; // after one warm-up message
  std::uint64_t rate_messages = 10000;
};

struct TsiResult {
  Mode mode = Mode::bitcode;
  bool cached = true;
  double latency_ns = 0;         // mean one-way (sim) or half round trip (tcp)
  double msg_rate_per_s = 0;
  std::uint64_t counter = 0;     // increase of the target counter, read back at the end
  std::uint64_t expected_counter = 0;
  std::uint64_t full_sends = 0;
  std::uint64_t truncated_sends = 0;
  std::uint64_t wire_bytes = 0;
  std::vector<std::uint64_t> handle_ns; // target-side lookup+execute per message (sim only)
};

/// Target is node 0, client is node 1. Throws Errc::oracle_mismatch when the
/// counter disagrees with the number of messages sent.
TsiResult run_tsi(const TsiConfig& cfg, const RunEnv& env);
TsiResult run_tsi(const TsiConfig& cfg, const RunEnv& env, Fabric& fabric);

struct BreakdownRow {
  std::string mode;
  std::uint64_t trans_ns = 0;
  std::optional<std::uint64_t> jit_ns; // absent for cached and AM rows
  std::uint64_t lookup_exec_ns = 0;
  std::uint64_t total_ns = 0;

  bool identity_holds() const noexcept { return total_ns == trans_ns + jit_ns.value_or(0) + lookup_exec_ns; }
};

struct BreakdownReport {
  BreakdownRow am;
  BreakdownRow uncached;
  BreakdownRow cached;

  bool identities_hold() const noexcept {
    return am.identity_holds() && uncached.identity_holds() && cached.identity_holds() && !am.jit_ns &&
           !cached.jit_ns && uncached.jit_ns;
  }
};

/// Transfer times come from the simulated model, JIT is the median of
/// fresh compiles of the TSI archive, lookup+execute is the median measured
/// handling time on the target.
BreakdownReport run_breakdown(const RunEnv& env, std::uint64_t samples = 200);

struct ChaseConfig {
  Mode mode = Mode::bitcode;
  std::uint64_t servers = 4;
  std::uint64_t shard_size = 1024;
  std::uint64_t depth = 64;
  std::uint64_t chases = 100;
  std::uint64_t seed = 42;
  std::uint64_t entry_server = 0;
};

struct ChaseResult {
  std::string mode;
  ChaseConfig config;
  std::uint64_t elapsed_ns = 0;
  double chases_per_s = 0;
  std::uint64_t forwards = 0;
  std::uint64_t expected_forwards = 0;
  std::uint64_t gets = 0;
  std::uint64_t wire_bytes = 0;
  std::vector<std::uint64_t> starts;
  std::vector<std::uint64_t> values;
};

/// Servers are nodes [0, servers), the client is node `servers`.
/// Every result is checked against oracle_chase; a mismatch throws
/// Errc::oracle_mismatch naming the chase and the diverging hop.
ChaseResult run_dapc(const ChaseConfig& cfg, const RunEnv& env);
ChaseResult run_dapc(const ChaseConfig& cfg, const RunEnv& env, Fabric& fabric);
ChaseResult run_gbpc(const ChaseConfig& cfg, const RunEnv& env);
ChaseResult run_gbpc(const ChaseConfig& cfg, const RunEnv& env, Fabric& fabric);

/// Start indices used for a configuration; identical for DAPC and GBPC.
std::vector<std::uint64_t> chase_starts(const PointerTable& table, std::uint64_t chases, std::uint64_t seed);

enum class SweepAxis { depth, servers };

struct SweepConfig {
  SweepAxis axis = SweepAxis::depth;
  ChaseConfig base;
  std::vector<std::uint64_t> grid; // empty: powers of two up to 4096, or 1..16 servers
  std::vector<std::string> modes = {"am", "binary", "bitcode", "gbpc"};
};

std::vector<std::uint64_t> default_depth_grid();
std::vector<std::uint64_t> default_server_grid();
std::vector<ChaseResult> sweep(const SweepConfig& cfg, const RunEnv& env);

inline constexpr std::string_view kCsvHeader = "mode,servers,shard_size,depth,chases_per_s,forwards,bytes_on_wire";
std::string csv_row(const ChaseResult& r);

} // namespace bitchain::bench
