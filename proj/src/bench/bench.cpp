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

#include "bitchain/bench/bench.hpp"

#include "bitchain/pcode/archive.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <fstream>
#include <iterator>
#include <random>

namespace bitchain::bench {

namespace {

using node::Node;

std::uint64_t load64(ByteSpan s, std::size_t off) { return load_le<std::uint64_t>(s.data() + off); }
void store64(MutableByteSpan s, std::size_t off, std::uint64_t v) { store_le<std::uint64_t>(s.data() + off, v); }

std::uint64_t median(std::vector<std::uint64_t> v) {
  if (v.empty())
    return 0;
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

std::uint64_t read_remote64(Fabric& fabric, Node& local, net::NodeId id, std::size_t off) {
  if (fabric.is_local(id))
    return load64(fabric.node(id).region(), off);
  ByteVec v = local.get(id, off, 8);
  return load_le<std::uint64_t>(v.data());
}

void check_chase(const ChaseConfig& cfg) {
  if (cfg.servers == 0 || cfg.shard_size == 0)
    throw Error(Errc::invalid_argument, "need at least one server and a non-empty shard");
  if (cfg.depth == 0)
    throw Error(Errc::invalid_argument, "chase depth must be at least 1");
  if (cfg.entry_server >= cfg.servers)
    throw Error(Errc::invalid_argument, "entry server " + std::to_string(cfg.entry_server) + " is not a server");
}

std::string divergence(const ChaseTrace& t, std::uint64_t got) {
  for (std::size_t j = 0; j < t.reads.size(); ++j)
    if (t.reads[j] == got)
      return "result matches the walk after hop " + std::to_string(j);
  return "result is not on the oracle walk (diverged at hop 0)";
}

} // namespace

std::string_view to_string(Mode m) noexcept {
  switch (m) {
  case Mode::am: return "am";
  case Mode::binary: return "binary";
  case Mode::bitcode: return "bitcode";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  if (s == "am")
    return Mode::am;
  if (s == "binary")
    return Mode::binary;
  if (s == "bitcode")
    return Mode::bitcode;
  throw Error(Errc::invalid_argument, "unknown mode '" + std::string(s) + "'");
}

wire::Mode wire_mode(Mode m) {
  switch (m) {
  case Mode::am: return wire::Mode::ActiveMessage;
  case Mode::binary: return wire::Mode::Prelinked;
  case Mode::bitcode: return wire::Mode::Portable;
  }
  return wire::Mode::Portable;
}

node::NodeConfig RunEnv::node_config(net::NodeId id) const {
  node::NodeConfig c;
  if (!profiles.empty())
    c.profile = profiles[id % profiles.size()];
  c.ifunc_dir = ifunc_dir;
  c.caching = sender_caching;
  return c;
}

std::vector<node::NodeConfig> RunEnv::node_configs(std::size_t n) const {
  std::vector<node::NodeConfig> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(node_config(static_cast<net::NodeId>(i)));
  return out;
}

void setup_dapc_server(Node& n, const PointerTable& table) {
  const std::uint64_t id = n.id();
  if (id >= table.num_servers)
    throw Error(Errc::invalid_argument, "node " + std::to_string(id) + " is not a server");
  n.transport().resize_region(exec::layout::kEntries + 8 * table.shard_size);
  auto r = n.region();
  store64(r, exec::layout::kNodeId, id);
  store64(r, exec::layout::kNumServers, table.num_servers);
  store64(r, exec::layout::kShardSize, table.shard_size);
  store64(r, kForwardCounter, 0);
  for (std::uint64_t i = 0; i < table.shard_size; ++i)
    store64(r, exec::layout::kEntries + 8 * i, table.entries[id * table.shard_size + i]);

  n.register_ifunc("return_result");

  auto am_forwards = std::make_shared<std::uint64_t>(0);
  n.am_register(am::kChase, [am_forwards](Node& self, const node::AmMessage& m) {
    if (m.payload.size() != 24)
      throw Error(Errc::malformed, "chase payload must be 24 bytes");
    auto region = self.region();
    std::uint64_t addr = load64(m.payload, 0);
    std::uint64_t depth = load64(m.payload, 8);
    const std::uint64_t dest = load64(m.payload, 16);
    const std::uint64_t me = load64(region, exec::layout::kNodeId);
    const std::uint64_t shard = load64(region, exec::layout::kShardSize);
    while (depth > 0) {
      std::uint64_t owner = addr / shard;
      if (owner != me) {
        std::uint8_t out[24];
        store_le<std::uint64_t>(out, addr);
        store_le<std::uint64_t>(out + 8, depth);
        store_le<std::uint64_t>(out + 16, dest);
        ++*am_forwards;
        self.am_send(static_cast<net::NodeId>(owner), am::kChase, out);
        return;
      }
      addr = load64(region, exec::layout::kEntries + 8 * (addr % shard));
      --depth;
    }
    std::uint8_t out[8];
    store_le<std::uint64_t>(out, addr);
    self.am_send(static_cast<net::NodeId>(dest), am::kResult, out);
  });
  n.on_execute = [&n, am_forwards](const node::ExecRecord&) {
    store64(n.region(), kForwardCounter, *am_forwards + n.hostcalls()[pcode::Capability::SendSelf]);
  };
}

void setup_dapc_client(Node& n) {
  n.transport().resize_region(client_layout::kSize);
  n.am_register(am::kResult, [](Node& self, const node::AmMessage& m) {
    if (m.payload.size() != 8)
      throw Error(Errc::malformed, "result payload must be 8 bytes");
    auto r = self.region();
    store64(r, client_layout::kResult, load64(m.payload, 0));
    store64(r, client_layout::kCounter, load64(r, client_layout::kCounter) + 1);
  });
}

void setup_tsi_server(Node& n) {
  n.transport().resize_region(client_layout::kSize);
  n.am_register(am::kIncrement, [](Node& self, const node::AmMessage&) {
    auto r = self.region();
    store64(r, kTsiCounter, load64(r, kTsiCounter) + 1);
  });
  const std::uint64_t tsi = node::type_id_of("tsi");
  n.on_execute = [&n, tsi](const node::ExecRecord& rec) {
    bool is_tsi = rec.mode == wire::Mode::ActiveMessage ? rec.am_index == am::kIncrement : rec.type_id == tsi;
    if (!is_tsi || rec.payload.empty() || rec.payload[0] != 1)
      return;
    std::uint8_t out[8];
    store_le<std::uint64_t>(out, rec.started_ns);
    try {
      n.am_send(rec.src, am::kAck, out);
    } catch (const Error&) {
    }
  };
}

void setup_tsi_client(Node& n) {
  n.transport().resize_region(client_layout::kSize);
  n.am_register(am::kAck, [](Node& self, const node::AmMessage& m) {
    auto r = self.region();
    store64(r, client_layout::kResult, m.payload.size() == 8 ? load64(m.payload, 0) : 0);
    store64(r, client_layout::kCounter, load64(r, client_layout::kCounter) + 1);
  });
}

void install_shutdown(Node& n, bool* stop) {
  n.am_register(am::kShutdown, [stop](Node&, const node::AmMessage&) { *stop = true; });
}

TsiResult run_tsi(const TsiConfig& cfg, const RunEnv& env) {
  SimFabric fabric(2, env.net, env.node_configs(2));
  setup_tsi_server(fabric.node(0));
  setup_tsi_client(fabric.node(1));
  return run_tsi(cfg, env, fabric);
}

TsiResult run_tsi(const TsiConfig& cfg, const RunEnv& env, Fabric& fabric) {
  constexpr net::NodeId kTarget = 0, kClient = 1;
  Node& c = fabric.node(kClient);
  TsiResult res;
  res.mode = cfg.mode;
  res.cached = c.config().caching;

  wire::MessageFrame frames[2];
  if (cfg.mode != Mode::am) {
    auto h = c.register_ifunc("tsi");
    for (std::uint8_t flag = 0; flag < 2; ++flag)
      frames[flag] = c.create_message(h, ByteSpan(&flag, 1), wire_mode(cfg.mode));
  }
  auto send = [&](std::uint8_t flag) {
    if (cfg.mode == Mode::am)
      c.am_send(kTarget, am::kIncrement, ByteSpan(&flag, 1));
    else
      c.send_ifunc(kTarget, frames[flag]);
  };
  auto acks = [&] { return load64(c.region(), client_layout::kCounter); };
  auto last_started = [&] { return load64(c.region(), client_layout::kResult); };
  auto now = [&] { return c.transport().now_ns(); };

  std::function<void(const node::ExecRecord&)> prev;
  if (fabric.is_local(kTarget)) {
    Node& t = fabric.node(kTarget);
    prev = t.on_execute;
    t.on_execute = [&res, prev](const node::ExecRecord& rec) {
      res.handle_ns.push_back(rec.handle_ns);
      if (prev)
        prev(rec);
    };
  }

  const std::uint64_t counter_before = read_remote64(fabric, c, kTarget, kTsiCounter);
  const auto base = c.counters();
  std::uint64_t sent = 0;
  double sum = 0;
  for (std::uint64_t i = 0; i <= cfg.latency_iterations; ++i) {
    std::uint64_t want = acks() + 1;
    std::uint64_t issued = now();
    send(1);
    ++sent;
    fabric.drive([&] { return acks() >= want; }, "tsi latency");
    if (i == 0)
      continue;
    sum += fabric.simulated() ? static_cast<double>(last_started() - issued)
                              : static_cast<double>(now() - issued) / 2.0;
  }
  if (cfg.latency_iterations > 0)
    res.latency_ns = sum / static_cast<double>(cfg.latency_iterations);

  if (cfg.rate_messages > 0) {
    const std::uint64_t n = cfg.rate_messages;
    std::uint64_t want = acks() + 1;
    std::uint64_t pushed = 0;
    std::uint64_t t0 = now();
    fabric.drive(
        [&] {
          while (pushed < n && c.transport().credits(kTarget) > 0) {
            send(pushed + 1 == n ? 1 : 0);
            ++pushed;
          }
          return pushed == n && acks() >= want;
        },
        "tsi rate");
    sent += n;
    std::uint64_t t1 = fabric.simulated() ? last_started() : now();
    res.msg_rate_per_s = static_cast<double>(n) * 1e9 / static_cast<double>(std::max<std::uint64_t>(1, t1 - t0));
  }

  if (fabric.is_local(kTarget))
    fabric.node(kTarget).on_execute = prev;
  res.counter = read_remote64(fabric, c, kTarget, kTsiCounter) - counter_before;
  res.expected_counter = sent;
  res.full_sends = c.counters().full_sends - base.full_sends;
  res.truncated_sends = c.counters().truncated_sends - base.truncated_sends;
  res.wire_bytes = c.counters().wire_bytes - base.wire_bytes;
  if (res.counter != res.expected_counter)
    throw Error(Errc::oracle_mismatch, "target counter " + std::to_string(res.counter) + " after " +
                                           std::to_string(sent) + " increments");
  (void)env;
  return res;
}

BreakdownReport run_breakdown(const RunEnv& env, std::uint64_t samples) {
  if (samples == 0)
    throw Error(Errc::invalid_argument, "need at least one sample");
  TsiConfig cfg;
  cfg.latency_iterations = samples;
  cfg.rate_messages = 0;

  RunEnv cached_env = env;
  cached_env.sender_caching = true;
  RunEnv uncached_env = env;
  uncached_env.sender_caching = false;

  auto row = [](std::string name, const TsiResult& r, std::optional<std::uint64_t> jit) {
    BreakdownRow b;
    b.mode = std::move(name);
    b.trans_ns = static_cast<std::uint64_t>(std::llround(r.latency_ns));
    b.jit_ns = jit;
    b.lookup_exec_ns = median(r.handle_ns);
    b.total_ns = b.trans_ns + b.jit_ns.value_or(0) + b.lookup_exec_ns;
    return b;
  };

  cfg.mode = Mode::am;
  TsiResult am_run = run_tsi(cfg, cached_env);
  cfg.mode = Mode::bitcode;
  TsiResult unc_run = run_tsi(cfg, uncached_env);
  TsiResult cac_run = run_tsi(cfg, cached_env);

  std::ifstream in(env.ifunc_dir / "tsi.pbca", std::ios::binary);
  if (!in)
    throw Error(Errc::not_found, "no tsi.pbca in " + env.ifunc_dir.string());
  ByteVec bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto profile = pcode::TargetProfile::named(env.node_config(0).profile);
  auto caps = pcode::CapabilityRegistry::all();
  std::vector<std::uint64_t> jit;
  for (std::uint64_t i = 0; i < samples; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    auto archive = pcode::parse_archive(bytes);
    auto fn = pcode::compile(pcode::select_variant(archive, profile), profile, caps, node::type_id_of("tsi"));
    jit.push_back(static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count()));
  }

  BreakdownReport rep;
  rep.am = row("am", am_run, std::nullopt);
  rep.uncached = row("uncached", unc_run, median(jit));
  rep.cached = row("cached", cac_run, std::nullopt);
  return rep;
}

std::vector<std::uint64_t> chase_starts(const PointerTable& table, std::uint64_t chases, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<std::uint64_t> pick(0, table.size() - 1);
  std::vector<std::uint64_t> out(chases);
  for (auto& s : out)
    s = pick(rng);
  return out;
}

ChaseResult run_dapc(const ChaseConfig& cfg, const RunEnv& env) {
  check_chase(cfg);
  PointerTable table = gen_table(cfg.servers, cfg.shard_size, cfg.seed);
  SimFabric fabric(cfg.servers + 1, env.net, env.node_configs(cfg.servers + 1));
  for (net::NodeId s = 0; s < cfg.servers; ++s)
    setup_dapc_server(fabric.node(s), table);
  setup_dapc_client(fabric.node(static_cast<net::NodeId>(cfg.servers)));
  return run_dapc(cfg, env, fabric);
}

ChaseResult run_dapc(const ChaseConfig& cfg, const RunEnv& env, Fabric& fabric) {
  check_chase(cfg);
  (void)env;
  PointerTable table = gen_table(cfg.servers, cfg.shard_size, cfg.seed);
  const auto client_id = static_cast<net::NodeId>(cfg.servers);
  if (fabric.size() != cfg.servers + 1)
    throw Error(Errc::invalid_argument, "fabric has " + std::to_string(fabric.size()) + " nodes, need " +
                                            std::to_string(cfg.servers + 1));
  Node& c = fabric.node(client_id);
  ChaseResult res;
  res.mode = std::string(to_string(cfg.mode));
  res.config = cfg;
  res.starts = chase_starts(table, cfg.chases, cfg.seed);

  node::IfuncHandle chaser;
  if (cfg.mode != Mode::am)
    chaser = c.register_ifunc("chaser");
  auto counter = [&] { return load64(c.region(), client_layout::kCounter); };

  std::vector<std::uint64_t> fwd_before(cfg.servers);
  for (net::NodeId s = 0; s < cfg.servers; ++s)
    fwd_before[s] = read_remote64(fabric, c, s, kForwardCounter);
  const std::uint64_t bytes_before = fabric.wire_bytes();

  const auto entry = static_cast<net::NodeId>(cfg.entry_server);
  const std::uint64_t t0 = c.transport().now_ns();
  for (std::uint64_t start : res.starts) {
    std::uint8_t payload[24];
    store_le<std::uint64_t>(payload, start);
    store_le<std::uint64_t>(payload + 8, cfg.depth);
    store_le<std::uint64_t>(payload + 16, client_id);
    const std::uint64_t want = counter() + 1;
    if (cfg.mode == Mode::am)
      c.am_send(entry, am::kChase, payload);
    else
      c.send_ifunc(entry, c.create_message(chaser, payload, wire_mode(cfg.mode)));
    fabric.drive([&] { return counter() >= want; }, "dapc chase");
    res.values.push_back(load64(c.region(), client_layout::kResult));
  }
  res.elapsed_ns = c.transport().now_ns() - t0;
  res.wire_bytes = fabric.wire_bytes() - bytes_before;

  for (net::NodeId s = 0; s < cfg.servers; ++s)
    res.forwards += read_remote64(fabric, c, s, kForwardCounter) - fwd_before[s];
  for (std::size_t i = 0; i < res.starts.size(); ++i) {
    ChaseTrace t = oracle_chase(table, res.starts[i], cfg.depth);
    if (res.values[i] != t.value)
      throw Error(Errc::oracle_mismatch, "dapc " + res.mode + " chase " + std::to_string(i) + " from " +
                                             std::to_string(res.starts[i]) + ": got " +
                                             std::to_string(res.values[i]) + ", oracle " + std::to_string(t.value) +
                                             "; " + divergence(t, res.values[i]));
    res.expected_forwards += expected_forwards(t, cfg.entry_server);
  }
  if (res.forwards != res.expected_forwards)
    throw Error(Errc::oracle_mismatch, "dapc " + res.mode + " made " + std::to_string(res.forwards) +
                                           " forwards, oracle expects " + std::to_string(res.expected_forwards));
  res.chases_per_s = static_cast<double>(cfg.chases) * 1e9 / static_cast<double>(std::max<std::uint64_t>(1, res.elapsed_ns));
  return res;
}

ChaseResult run_gbpc(const ChaseConfig& cfg, const RunEnv& env) {
  check_chase(cfg);
  PointerTable table = gen_table(cfg.servers, cfg.shard_size, cfg.seed);
  SimFabric fabric(cfg.servers + 1, env.net, env.node_configs(cfg.servers + 1));
  for (net::NodeId s = 0; s < cfg.servers; ++s)
    setup_dapc_server(fabric.node(s), table);
  setup_dapc_client(fabric.node(static_cast<net::NodeId>(cfg.servers)));
  return run_gbpc(cfg, env, fabric);
}

ChaseResult run_gbpc(const ChaseConfig& cfg, const RunEnv& env, Fabric& fabric) {
  check_chase(cfg);
  (void)env;
  PointerTable table = gen_table(cfg.servers, cfg.shard_size, cfg.seed);
  const auto client_id = static_cast<net::NodeId>(cfg.servers);
  Node& c = fabric.node(client_id);
  ChaseResult res;
  res.mode = "gbpc";
  res.config = cfg;
  res.starts = chase_starts(table, cfg.chases, cfg.seed);

  const std::uint64_t gets_before = c.transport().counters().gets;
  const std::uint64_t bytes_before = fabric.wire_bytes();
  const std::uint64_t t0 = c.transport().now_ns();
  for (std::uint64_t start : res.starts) {
    std::uint64_t addr = start;
    for (std::uint64_t d = 0; d < cfg.depth; ++d) {
      auto owner = static_cast<net::NodeId>(addr / cfg.shard_size);
      ByteVec v = c.get(owner, exec::layout::kEntries + 8 * (addr % cfg.shard_size), 8);
      addr = load_le<std::uint64_t>(v.data());
    }
    res.values.push_back(addr);
  }
  res.elapsed_ns = c.transport().now_ns() - t0;
  res.wire_bytes = fabric.wire_bytes() - bytes_before;
  res.gets = c.transport().counters().gets - gets_before;

  for (std::size_t i = 0; i < res.starts.size(); ++i) {
    ChaseTrace t = oracle_chase(table, res.starts[i], cfg.depth);
    if (res.values[i] != t.value)
      throw Error(Errc::oracle_mismatch, "gbpc chase " + std::to_string(i) + ": got " +
                                             std::to_string(res.values[i]) + ", oracle " + std::to_string(t.value) +
                                             "; " + divergence(t, res.values[i]));
  }
  if (res.gets != cfg.chases * cfg.depth)
    throw Error(Errc::oracle_mismatch, "gbpc issued " + std::to_string(res.gets) + " gets, expected " +
                                           std::to_string(cfg.chases * cfg.depth));
  res.chases_per_s = static_cast<double>(cfg.chases) * 1e9 / static_cast<double>(std::max<std::uint64_t>(1, res.elapsed_ns));
  return res;
}

std::vector<std::uint64_t> default_depth_grid() {
  std::vector<std::uint64_t> g;
  for (std::uint64_t d = 1; d <= 4096; d *= 2)
    g.push_back(d);
  return g;
}

std::vector<std::uint64_t> default_server_grid() { return {1, 2, 4, 8, 16}; }

std::vector<ChaseResult> sweep(const SweepConfig& cfg, const RunEnv& env) {
  std::vector<std::uint64_t> grid = cfg.grid;
  if (grid.empty())
    grid = cfg.axis == SweepAxis::depth ? default_depth_grid() : default_server_grid();
  std::vector<ChaseResult> out;
  for (const auto& mode : cfg.modes) {
    for (std::uint64_t v : grid) {
      ChaseConfig c = cfg.base;
      if (cfg.axis == SweepAxis::depth)
        c.depth = v;
      else
        c.servers = v;
      if (c.entry_server >= c.servers)
        c.entry_server = 0;
      if (mode == "gbpc") {
        out.push_back(run_gbpc(c, env));
      } else {
        c.mode = parse_mode(mode);
        out.push_back(run_dapc(c, env));
      }
    }
  }
  return out;
}

std::string csv_row(const ChaseResult& r) {
  return fmt::format("{},{},{},{},{:.3f},{},{}", r.mode, r.config.servers, r.config.shard_size, r.config.depth,
                     r.chases_per_s, r.forwards, r.wire_bytes);
}

} // namespace bitchain::bench
