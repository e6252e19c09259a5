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
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

using namespace bitchain;
using namespace bitchain::bench;

namespace {

RunEnv env() {
  RunEnv e;
  e.ifunc_dir = test::ifunc_dir();
  return e;
}

// Independent walk: value after depth hops and the number of owner changes
// between consecutive reads.
std::pair<std::uint64_t, std::uint64_t> walk(const PointerTable& t, std::uint64_t start, std::uint64_t depth) {
  std::uint64_t at = start, changes = 0;
  for (std::uint64_t i = 0; i < depth; ++i) {
    std::uint64_t next = t.entries[at];
    if (i + 1 < depth && next / t.shard_size != at / t.shard_size)
      ++changes;
    at = next;
  }
  return {at, changes};
}

ChaseConfig chase(Mode m, std::uint64_t servers, std::uint64_t depth, std::uint64_t chases = 10) {
  ChaseConfig c;
  c.mode = m;
  c.servers = servers;
  c.shard_size = 64;
  c.depth = depth;
  c.chases = chases;
  c.seed = 42;
  return c;
}

} // namespace

TEST(Table, SmallTableIsAFourCycle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PointerTable t = gen_table(1, 4, seed);
    ASSERT_EQ(t.size(), 4u);
    EXPECT_TRUE(is_single_cycle(t.entries)) << seed;
    std::set<std::uint64_t> seen(t.entries.begin(), t.entries.end());
    EXPECT_EQ(seen.size(), 4u);
    for (std::uint64_t i = 0; i < 4; ++i)
      EXPECT_NE(t.entries[i], i);
  }
}

TEST(Table, DeterministicAndSingleCycle) {
  EXPECT_EQ(gen_table(4, 256, 7).entries, gen_table(4, 256, 7).entries);
  EXPECT_NE(gen_table(4, 256, 7).entries, gen_table(4, 256, 8).entries);
  for (std::uint64_t s : {1, 2, 3, 8})
    EXPECT_TRUE(is_single_cycle(gen_table(s, 100, s).entries));
}

TEST(Table, CycleCheckerRejects) {
  EXPECT_FALSE(is_single_cycle({}));
  EXPECT_FALSE(is_single_cycle({0}) && false);
  EXPECT_FALSE(is_single_cycle({1, 0, 3, 2}));
  EXPECT_FALSE(is_single_cycle({0, 2, 1}));
  EXPECT_FALSE(is_single_cycle({5, 0}));
  EXPECT_TRUE(is_single_cycle({1, 2, 0}));
}

TEST(Table, Errors) {
  EXPECT_ERRC(gen_table(0, 4, 1), Errc::invalid_argument);
  EXPECT_ERRC(gen_table(4, 0, 1), Errc::invalid_argument);
}

TEST(Table, Ownership) {
  PointerTable t = gen_table(2, 4, 1);
  EXPECT_EQ(t.owner(7), 1u);
  EXPECT_EQ(t.owner(3), 0u);
  EXPECT_EQ(t.owner(4), 1u);
}

TEST(Oracle, DepthOne) {
  PointerTable t = gen_table(3, 50, 9);
  for (std::uint64_t i = 0; i < t.size(); ++i) {
    ChaseTrace tr = oracle_chase(t, i, 1);
    EXPECT_EQ(tr.value, t.entries[i]);
    EXPECT_EQ(tr.reads, std::vector<std::uint64_t>{i});
    EXPECT_EQ(tr.transitions, 0u);
  }
  EXPECT_ERRC(oracle_chase(t, t.size(), 1), Errc::invalid_argument);
}

TEST(Oracle, SingleServerHasNoTransitions) {
  PointerTable t = gen_table(1, 1000, 3);
  EXPECT_EQ(oracle_chase(t, 17, 4096).transitions, 0u);
}

TEST(Oracle, TransitionsAgreeWithIndependentWalk) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 200; ++k) {
    std::uint64_t servers = 1 + rng() % 8, shard = 1 + rng() % 64, depth = 1 + rng() % 300;
    PointerTable t = gen_table(servers, shard, rng());
    std::uint64_t start = rng() % t.size();
    ChaseTrace tr = oracle_chase(t, start, depth);
    auto [value, changes] = walk(t, start, depth);
    ASSERT_EQ(tr.value, value);
    ASSERT_EQ(tr.transitions, changes);
    // Third count straight from the recorded owners.
    std::uint64_t diff = 0;
    for (std::size_t i = 1; i < tr.owners.size(); ++i)
      diff += tr.owners[i] != tr.owners[i - 1];
    ASSERT_EQ(tr.transitions, diff);
    ASSERT_EQ(tr.reads.size(), depth);
  }
}

TEST(Oracle, ExpectedForwardsCountsAWrongEntry) {
  PointerTable t = gen_table(4, 16, 5);
  std::uint64_t start = 5; // owned by server 0
  ChaseTrace tr = oracle_chase(t, start, 10);
  EXPECT_EQ(expected_forwards(tr, 0), tr.transitions);
  EXPECT_EQ(expected_forwards(tr, 2), tr.transitions + 1);
}

TEST(Dapc, AllModesMatchTheOracle) {
  for (Mode m : {Mode::am, Mode::binary, Mode::bitcode}) {
    ChaseResult r = run_dapc(chase(m, 4, 64), env());
    PointerTable t = gen_table(4, 64, 42);
    ASSERT_EQ(r.values.size(), 10u);
    std::uint64_t fwd = 0;
    for (std::size_t i = 0; i < r.starts.size(); ++i) {
      auto [value, changes] = walk(t, r.starts[i], 64);
      EXPECT_EQ(r.values[i], value) << to_string(m) << " chase " << i;
      fwd += changes + (r.starts[i] / 64 != 0 ? 1 : 0);
    }
    EXPECT_EQ(r.forwards, fwd) << to_string(m);
    EXPECT_EQ(r.expected_forwards, fwd);
    EXPECT_GT(r.chases_per_s, 0);
  }
}

TEST(Dapc, SingleServerNeverForwards) {
  for (Mode m : {Mode::am, Mode::bitcode}) {
    ChaseResult r = run_dapc(chase(m, 1, 500), env());
    EXPECT_EQ(r.forwards, 0u);
  }
}

TEST(Dapc, WrongEntryServerAddsOneForward) {
  ChaseConfig c = chase(Mode::bitcode, 4, 32, 20);
  ChaseResult a = run_dapc(c, env());
  c.entry_server = 3;
  ChaseResult b = run_dapc(c, env());
  EXPECT_EQ(a.values, b.values);
  std::int64_t delta = 0;
  for (std::uint64_t s : a.starts)
    delta += (s / 64 != 3) - (s / 64 != 0);
  EXPECT_EQ(static_cast<std::int64_t>(b.forwards) - static_cast<std::int64_t>(a.forwards), delta);
}

TEST(Dapc, BadConfigs) {
  EXPECT_ERRC(run_dapc(chase(Mode::am, 0, 4), env()), Errc::invalid_argument);
  EXPECT_ERRC(run_dapc(chase(Mode::am, 2, 0), env()), Errc::invalid_argument);
  ChaseConfig c = chase(Mode::am, 2, 4);
  c.entry_server = 2;
  EXPECT_ERRC(run_dapc(c, env()), Errc::invalid_argument);
}

TEST(Dapc, SendAccountingPerChase) {
  // Every chase is one injection, one send per forward and one result.
  ChaseConfig c = chase(Mode::bitcode, 3, 100, 8);
  RunEnv e = env();
  PointerTable t = gen_table(c.servers, c.shard_size, c.seed);
  SimFabric fab(c.servers + 1, e.net, e.node_configs(c.servers + 1));
  for (net::NodeId s = 0; s < c.servers; ++s)
    setup_dapc_server(fab.node(s), t);
  setup_dapc_client(fab.node(static_cast<net::NodeId>(c.servers)));
  ChaseResult r = run_dapc(c, e, fab);
  std::uint64_t hostcall_sends = 0, node_sends = 0;
  for (net::NodeId s = 0; s < c.servers; ++s) {
    const auto& h = fab.node(s).hostcalls();
    hostcall_sends += h[pcode::Capability::SendSelf] + h[pcode::Capability::Send];
    node_sends += fab.node(s).counters().full_sends + fab.node(s).counters().truncated_sends;
  }
  EXPECT_EQ(hostcall_sends, r.forwards + c.chases);
  EXPECT_EQ(node_sends, hostcall_sends);
  node::Node& client = fab.node(static_cast<net::NodeId>(c.servers));
  EXPECT_EQ(client.counters().full_sends + client.counters().truncated_sends, c.chases);
  // One full frame per (type, channel) on first use.
  std::uint64_t full = 0, pairs = 0;
  for (net::NodeId s = 0; s <= c.servers; ++s) {
    full += fab.node(s).counters().full_sends;
    for (net::NodeId d = 0; d <= c.servers; ++d)
      for (const char* ty : {"chaser", "return_result"})
        pairs += fab.node(s).sent_to(node::type_id_of(ty), d);
  }
  EXPECT_EQ(full, pairs);
  // The client auto-registered the result ifunc once.
  EXPECT_EQ(client.compile_count(node::type_id_of("return_result")), 1u);
}

TEST(Gbpc, MatchesOracleWithDepthGets) {
  ChaseResult r = run_gbpc(chase(Mode::am, 4, 50, 6), env());
  PointerTable t = gen_table(4, 64, 42);
  for (std::size_t i = 0; i < r.starts.size(); ++i)
    EXPECT_EQ(r.values[i], walk(t, r.starts[i], 50).first);
  EXPECT_EQ(r.gets, 300u);
  EXPECT_EQ(r.mode, "gbpc");
  // Each GET is a full round trip of an 8-byte read.
  EXPECT_EQ(r.elapsed_ns, 300u * 2001u);
}

TEST(Gbpc, SameStartsAsDapc) {
  EXPECT_EQ(run_gbpc(chase(Mode::am, 2, 8), env()).starts, run_dapc(chase(Mode::am, 2, 8), env()).starts);
  EXPECT_EQ(run_gbpc(chase(Mode::am, 1, 8), env()).values, run_dapc(chase(Mode::bitcode, 1, 8), env()).values);
}

TEST(Sweep, DepthGridHasThirteenRowsPerMode) {
  auto g = default_depth_grid();
  ASSERT_EQ(g.size(), 13u);
  EXPECT_EQ(g.front(), 1u);
  EXPECT_EQ(g.back(), 4096u);
  SweepConfig s;
  s.base = chase(Mode::am, 2, 1, 2);
  s.base.shard_size = 16;
  s.modes = {"gbpc", "am"};
  auto rows = sweep(s, env());
  ASSERT_EQ(rows.size(), 26u);
  EXPECT_EQ(rows[0].mode, "gbpc");
  EXPECT_EQ(rows[13].mode, "am");
  EXPECT_EQ(rows[12].config.depth, 4096u);
}

TEST(Sweep, ServerAxisResetsEntry) {
  SweepConfig s;
  s.axis = SweepAxis::servers;
  s.base = chase(Mode::am, 4, 8, 2);
  s.base.entry_server = 3;
  s.grid = {1, 4};
  s.modes = {"am"};
  auto rows = sweep(s, env());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].config.entry_server, 0u);
  EXPECT_EQ(rows[1].config.entry_server, 3u);
  EXPECT_EQ(default_server_grid().size(), 5u);
}

TEST(Csv, HeaderAndRow) {
  EXPECT_EQ(kCsvHeader, "mode,servers,shard_size,depth,chases_per_s,forwards,bytes_on_wire");
  ChaseResult r;
  r.mode = "bitcode";
  r.config.servers = 4;
  r.config.shard_size = 1024;
  r.config.depth = 64;
  r.chases_per_s = 1234.5;
  r.forwards = 77;
  r.wire_bytes = 9000;
  EXPECT_EQ(csv_row(r), "bitcode,4,1024,64,1234.500,77,9000");
}

TEST(Modes, ParseAndPrint) {
  for (Mode m : {Mode::am, Mode::binary, Mode::bitcode})
    EXPECT_EQ(parse_mode(to_string(m)), m);
  EXPECT_ERRC(parse_mode("jit"), Errc::invalid_argument);
  EXPECT_EQ(wire_mode(Mode::binary), wire::Mode::Prelinked);
}

TEST(Tsi, CounterMatchesMessages) {
  TsiConfig c;
  c.mode = Mode::bitcode;
  c.latency_iterations = 20;
  c.rate_messages = 10000;
  TsiResult r = run_tsi(c, env());
  EXPECT_EQ(r.counter, 10000u + 21u);
  EXPECT_EQ(r.counter, r.expected_counter);
  EXPECT_EQ(r.full_sends, 1u);
  EXPECT_EQ(r.truncated_sends, 10020u);
  EXPECT_GT(r.msg_rate_per_s, 0);
}

TEST(Tsi, LatencyFollowsTheCostModel) {
  TsiConfig c;
  c.latency_iterations = 50;
  c.rate_messages = 0;
  c.mode = Mode::bitcode;
  RunEnv cached = env(), uncached = env();
  uncached.sender_caching = false;
  TsiResult rc = run_tsi(c, cached);
  TsiResult ru = run_tsi(c, uncached);
  // One-way: latency + ceil(bytes / 12.5).
  EXPECT_DOUBLE_EQ(rc.latency_ns, 1000.0 + 3.0);
  EXPECT_DOUBLE_EQ(ru.latency_ns, 1000.0 + 416.0);
  EXPECT_FALSE(ru.cached);
  EXPECT_NEAR(ru.latency_ns / rc.latency_ns, (1000.0 + 5188 / 12.5) / (1000.0 + 29 / 12.5), 0.01);
  c.mode = Mode::am;
  EXPECT_DOUBLE_EQ(run_tsi(c, cached).latency_ns, 1003.0);
}

TEST(Breakdown, IdentitiesHold) {
  BreakdownReport b = run_breakdown(env(), 20);
  EXPECT_TRUE(b.identities_hold());
  EXPECT_FALSE(b.cached.jit_ns.has_value());
  EXPECT_FALSE(b.am.jit_ns.has_value());
  ASSERT_TRUE(b.uncached.jit_ns.has_value());
  EXPECT_GT(*b.uncached.jit_ns, 0u);
  EXPECT_GT(b.uncached.total_ns, b.cached.total_ns);
  EXPECT_EQ(b.uncached.total_ns, b.uncached.trans_ns + *b.uncached.jit_ns + b.uncached.lookup_exec_ns);
  EXPECT_EQ(b.cached.total_ns, b.cached.trans_ns + b.cached.lookup_exec_ns);
  EXPECT_ERRC(run_breakdown(env(), 0), Errc::invalid_argument);
}

TEST(Env, ProfilesRoundRobin) {
  RunEnv e = env();
  e.profiles = {"le64-generic", "be64-generic"};
  EXPECT_EQ(e.node_config(0).profile, "le64-generic");
  EXPECT_EQ(e.node_config(3).profile, "be64-generic");
  EXPECT_EQ(e.node_configs(5).size(), 5u);
}

TEST(Dapc, MixedProfilesAgree) {
  RunEnv e = env();
  e.profiles = {"le64-generic", "be64-generic", "le64-fused"};
  ChaseResult mixed = run_dapc(chase(Mode::bitcode, 3, 64), e);
  ChaseResult plain = run_dapc(chase(Mode::bitcode, 3, 64), env());
  EXPECT_EQ(mixed.values, plain.values);
  EXPECT_EQ(mixed.forwards, plain.forwards);
}
