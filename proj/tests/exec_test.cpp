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

#include "bitchain/exec/exec.hpp"
#include "bitchain/pcode/archive.hpp"
#include "bitchain/pcode/assembler.hpp"
#include "bitchain/pcode/verifier.hpp"

#include "test_programs.hpp"
#include "test_util.hpp"

#include <random>

using namespace bitchain;
using namespace bitchain::pcode;
using bitchain::test::Outcome;
using bitchain::test::run_fn;
using exec::TrapKind;

namespace {

CompiledFunction shipped(const std::string& name, const std::string& profile = "le64-generic") {
  FatArchive a = parse_archive(bitchain::test::read_file(bitchain::test::ifunc_dir() / (name + ".pbca")));
  const auto p = TargetProfile::named(profile);
  return compile(select_variant(a, p), p, CapabilityRegistry::all(), fnv1a64(name));
}

CompiledFunction from_source(const std::string& src, const std::string& profile = "le64-generic") {
  return compile(assemble(src), TargetProfile::named(profile), CapabilityRegistry::all(), 77);
}

ByteVec u64s(std::initializer_list<std::uint64_t> vs) {
  ByteVec out(vs.size() * 8);
  std::size_t i = 0;
  for (auto v : vs)
    store_le<std::uint64_t>(out.data() + 8 * i++, v);
  return out;
}

// Server region for a table split in shards of `shard` entries.
ByteVec server_region(std::uint64_t id, std::uint64_t servers, std::uint64_t shard,
                      const std::vector<std::uint64_t>& entries) {
  ByteVec r(32 + 8 * shard);
  store_le<std::uint64_t>(r.data(), id);
  store_le<std::uint64_t>(r.data() + 8, servers);
  store_le<std::uint64_t>(r.data() + 16, shard);
  for (std::uint64_t i = 0; i < shard; ++i)
    store_le<std::uint64_t>(r.data() + 32 + 8 * i, entries[id * shard + i]);
  return r;
}

std::string hex64(std::uint64_t v) {
  ByteVec b(8);
  store_le<std::uint64_t>(b.data(), v);
  std::string s;
  for (auto c : b)
    s += fmt::format("{:02x}", c);
  return s;
}

} // namespace

TEST(Execute, TsiIncrementsCounter) {
  for (const auto& p : standard_profiles()) {
    ByteVec region(48, 0);
    store_le<std::uint64_t>(region.data() + 32, 41);
    Outcome o = run_fn(shipped("tsi", p.name), ByteVec{0}, region, 0);
    ASSERT_TRUE(o.status.ok()) << o.describe();
    EXPECT_EQ(*o.status.code, 0u);
    EXPECT_EQ(load_le<std::uint64_t>(o.region.data() + 32), 42u) << p.name;
    EXPECT_TRUE(o.log.empty());
  }
}

TEST(Execute, PayloadReadPastEndTraps) {
  auto fn = from_source("PUSH 4\nPLD64\nHALT");
  Outcome o = run_fn(fn, ByteVec(11, 0), ByteVec(8, 0), 0);
  ASSERT_FALSE(o.status.ok());
  EXPECT_EQ(o.status.trap->kind, TrapKind::memory_out_of_bounds);
  EXPECT_EQ(o.status.trap->pc, 9u);
  EXPECT_TRUE(run_fn(fn, ByteVec(12, 0), ByteVec(8, 0), 0).status.ok());
}

TEST(Execute, RegionBoundsChecked) {
  auto st = from_source("PUSH 41\nPUSH 1\nST64\nPUSH 0\nHALT");
  EXPECT_EQ(run_fn(st, {}, ByteVec(48, 0), 0).status.trap->kind, TrapKind::memory_out_of_bounds);
  EXPECT_TRUE(run_fn(st, {}, ByteVec(49, 0), 0).status.ok());
  auto huge = from_source("PUSH -1\nLD8\nHALT");
  EXPECT_EQ(run_fn(huge, {}, ByteVec(8, 0), 0).status.trap->kind, TrapKind::memory_out_of_bounds);
  auto wrap = from_source("PUSH -4\nLD64\nHALT");
  EXPECT_EQ(run_fn(wrap, {}, ByteVec(8, 0), 0).status.trap->kind, TrapKind::memory_out_of_bounds);
}

TEST(Execute, DivisionByZeroTraps) {
  for (const auto& p : standard_profiles()) {
    EXPECT_EQ(run_fn(from_source("PUSH 7\nPUSH 0\nDIVU\nHALT", p.name), {}, {}, 0).status.trap->kind,
              TrapKind::division_by_zero);
    EXPECT_EQ(run_fn(from_source("PUSH 7\nPUSH 0\nMODU\nHALT", p.name), {}, {}, 0).status.trap->kind,
              TrapKind::division_by_zero);
  }
}

TEST(Execute, ArithmeticWraps) {
  auto fn = from_source("PUSH -1\nPUSH 2\nADD\nHALT");
  EXPECT_EQ(*run_fn(fn, {}, {}, 0).status.code, 1u);
  auto sub = from_source("PUSH 0\nPUSH 1\nSUB\nHALT");
  EXPECT_EQ(*run_fn(sub, {}, {}, 0).status.code, ~0ull);
  auto cmp = from_source("PUSH 3\nPUSH 5\nLTU\nPUSH 4\nPUSH 4\nEQ\nADD\nHALT");
  EXPECT_EQ(*run_fn(cmp, {}, {}, 0).status.code, 2u);
}

TEST(Execute, FuelIsOnePerSourceInstruction) {
  const std::string src = "PUSH 1\nPUSH 2\nADD\nPUSH 3\nMUL\nHALT";
  for (const auto& p : standard_profiles()) {
    auto fn = from_source(src, p.name);
    EXPECT_TRUE(run_fn(fn, {}, {}, 0, 1, 6).status.ok()) << p.name;
    Outcome o = run_fn(fn, {}, {}, 0, 1, 5);
    ASSERT_FALSE(o.status.ok()) << p.name;
    EXPECT_EQ(o.status.trap->kind, TrapKind::fuel_exhausted);
  }
}

TEST(Execute, InfiniteLoopStopsOnFuel) {
  auto fn = from_source("top:\nJMP top");
  Outcome o = run_fn(fn, {}, {}, 0, 1, 1000);
  ASSERT_FALSE(o.status.ok());
  EXPECT_EQ(o.status.trap->kind, TrapKind::fuel_exhausted);
}

TEST(Execute, FuelBoundIsMonotone) {
  bitchain::test::ProgramGen gen(12);
  for (int i = 0; i < 60; ++i) {
    CodeBlob b = assemble(gen.listing());
    if (!verify(b).ok())
      continue;
    auto fn = compile(b, TargetProfile::named("le64-fused"), CapabilityRegistry::all());
    Outcome full = run_fn(fn, ByteVec(40, 1), ByteVec(80, 0), 0);
    // Any smaller budget either reproduces the result or stops on fuel.
    for (std::uint64_t fuel : {1, 3, 10, 30, 100}) {
      Outcome o = run_fn(fn, ByteVec(40, 1), ByteVec(80, 0), 0, 1, fuel);
      if (!o.status.ok() && o.status.trap->kind == TrapKind::fuel_exhausted)
        continue;
      EXPECT_EQ(o, full) << "fuel " << fuel;
    }
  }
}

TEST(Execute, ChaserDepthOneOnOwner) {
  // Two servers, shard 4. Entry 5 lives on server 1.
  std::vector<std::uint64_t> entries = {3, 6, 0, 2, 7, 1, 4, 5};
  ByteVec region = server_region(1, 2, 4, entries);
  Outcome o = run_fn(shipped("chaser"), u64s({5, 1, 9}), region, 1, fnv1a64("chaser"));
  ASSERT_TRUE(o.status.ok()) << o.describe();
  EXPECT_EQ(o.counters[Capability::Send], 1u);
  EXPECT_EQ(o.counters[Capability::SendSelf], 0u);
  ASSERT_EQ(o.log.size(), 1u);
  EXPECT_EQ(o.log[0], fmt::format("send {} 9 {}", fnv1a64("return_result"), hex64(entries[5])));
}

TEST(Execute, ChaserOnWrongServerForwardsToOwner) {
  std::vector<std::uint64_t> entries = {3, 6, 0, 2, 7, 1, 4, 5};
  ByteVec region = server_region(0, 2, 4, entries);
  Outcome o = run_fn(shipped("chaser"), u64s({6, 3, 2}), region, 0, fnv1a64("chaser"));
  ASSERT_TRUE(o.status.ok()) << o.describe();
  EXPECT_EQ(o.counters[Capability::SendSelf], 1u);
  EXPECT_EQ(o.counters[Capability::Send], 0u);
  ASSERT_EQ(o.log.size(), 1u);
  EXPECT_EQ(o.log[0], "send_self 1 " + hex64(6) + hex64(3) + hex64(2));
}

TEST(Execute, ChaserLocalHopsMakeNoHostcalls) {
  // One server: a depth-100 chase is a loop with a single result send.
  std::vector<std::uint64_t> entries(16);
  for (std::uint64_t i = 0; i < 16; ++i)
    entries[i] = (i * 5 + 3) % 16;
  ByteVec region = server_region(0, 1, 16, entries);
  std::uint64_t want = 4;
  for (int i = 0; i < 100; ++i)
    want = entries[want];
  Outcome o = run_fn(shipped("chaser"), u64s({4, 100, 1}), region, 0, fnv1a64("chaser"));
  ASSERT_TRUE(o.status.ok()) << o.describe();
  EXPECT_EQ(o.counters.total() - o.counters[Capability::Stage], 1u);
  ASSERT_EQ(o.log.size(), 1u);
  EXPECT_EQ(o.log[0], fmt::format("send {} 1 {}", fnv1a64("return_result"), hex64(want)));
}

TEST(Execute, ChaserPartialWalkStopsAtShardEdge) {
  // Two servers: 0 -> 1 -> 2 -> 5 (server 1).
  std::vector<std::uint64_t> entries = {1, 2, 5, 0, 6, 7, 3, 4};
  ByteVec region = server_region(0, 2, 4, entries);
  Outcome o = run_fn(shipped("chaser"), u64s({0, 10, 2}), region, 0, fnv1a64("chaser"));
  ASSERT_TRUE(o.status.ok());
  ASSERT_EQ(o.log.size(), 1u);
  EXPECT_EQ(o.log[0], "send_self 1 " + hex64(5) + hex64(7) + hex64(2));
}

TEST(Execute, ReturnResultStoresAndCounts) {
  ByteVec region(48, 0);
  store_le<std::uint64_t>(region.data() + 32, 5);
  Outcome o = run_fn(shipped("return_result"), u64s({1234}), region, 3);
  ASSERT_TRUE(o.status.ok());
  EXPECT_EQ(load_le<std::uint64_t>(o.region.data() + 40), 1234u);
  EXPECT_EQ(load_le<std::uint64_t>(o.region.data() + 32), 6u);
}

TEST(Hostcall, StageThenSendSelf) {
  auto fn = from_source(".import chain.stage\n.import chain.send_self\n"
                        "PUSH 0\nPUSH 7\nHOSTCALL chain.stage\nPUSH 2\nPUSH 8\nHOSTCALL chain.send_self\nPUSH 0\nHALT");
  Outcome o = run_fn(fn, {}, {}, 0);
  ASSERT_TRUE(o.status.ok()) << o.describe();
  ASSERT_EQ(o.log.size(), 1u);
  EXPECT_EQ(o.log[0], "send_self 2 0700000000000000");
}

TEST(Hostcall, SendSelfOutsideIfuncFails) {
  auto fn = from_source(".import chain.send_self\nPUSH 2\nPUSH 8\nHOSTCALL chain.send_self\nPUSH 0\nHALT");
  Outcome o = run_fn(fn, {}, {}, 0, std::nullopt);
  ASSERT_FALSE(o.status.ok());
  EXPECT_EQ(o.status.trap->kind, TrapKind::hostcall_failed);
  EXPECT_TRUE(o.log.empty());
}

TEST(Hostcall, StagingBounds) {
  auto fn = from_source(".import chain.stage\nPUSH 4089\nPUSH 1\nHOSTCALL chain.stage\nPUSH 0\nHALT");
  EXPECT_EQ(run_fn(fn, {}, {}, 0).status.trap->kind, TrapKind::memory_out_of_bounds);
  auto ok = from_source(".import chain.stage\nPUSH 4088\nPUSH 1\nHOSTCALL chain.stage\nPUSH 0\nHALT");
  EXPECT_TRUE(run_fn(ok, {}, {}, 0).status.ok());
  auto send = from_source(".import chain.send_self\nPUSH 1\nPUSH 4097\nHOSTCALL chain.send_self\nPUSH 0\nHALT");
  EXPECT_EQ(run_fn(send, {}, {}, 0).status.trap->kind, TrapKind::memory_out_of_bounds);
}

TEST(Hostcall, MemGetWritesLocalRegion) {
  auto fn = from_source(".import mem.get\nPUSH 1\nPUSH 32\nPUSH 8\nPUSH 64\nHOSTCALL mem.get\nHALT");
  Outcome o = run_fn(fn, {}, ByteVec(72, 0), 0);
  ASSERT_TRUE(o.status.ok()) << o.describe();
  EXPECT_EQ(*o.status.code, 0u); // mem.get pushes 0
  ASSERT_EQ(o.log.size(), 1u);
  EXPECT_EQ(o.log[0], "get 1 32 8");
  for (int i = 0; i < 8; ++i)
    EXPECT_EQ(o.region[64 + i], static_cast<std::uint8_t>(31 + 32 + i));
  // Local destination out of bounds.
  EXPECT_EQ(run_fn(fn, {}, ByteVec(71, 0), 0).status.trap->kind, TrapKind::memory_out_of_bounds);
  // Failures from the host surface as traps.
  auto bad = from_source(".import mem.get\nPUSH 9\nPUSH 32\nPUSH 8\nPUSH 0\nHOSTCALL mem.get\nHALT");
  EXPECT_EQ(run_fn(bad, {}, ByteVec(72, 0), 0).status.trap->kind, TrapKind::hostcall_failed);
}

TEST(Hostcall, MemPutReadsLocalRegion) {
  auto fn = from_source(".import mem.put\nPUSH 2\nPUSH 8\nPUSH 4\nPUSH 100\nHOSTCALL mem.put\nHALT");
  ByteVec region(16, 0);
  for (int i = 0; i < 16; ++i)
    region[i] = static_cast<std::uint8_t>(i);
  Outcome o = run_fn(fn, {}, region, 0);
  ASSERT_TRUE(o.status.ok()) << o.describe();
  ASSERT_EQ(o.log.size(), 1u);
  EXPECT_EQ(o.log[0], "put 2 100 08090a0b");
}

TEST(Execute, LocalsBounded) {
  CodeBlob b;
  b.locals_count = 1;
  b.code = {0x12, 5, 0, 0x00};
  EXPECT_ERRC(compile(b, TargetProfile::named("le64-generic"), CapabilityRegistry::none()), Errc::verify_failed);
}

TEST(CrossProfile, ShippedBlobsAgree) {
  const auto profiles = standard_profiles();
  std::mt19937_64 rng(2026);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t servers = 1 + rng() % 4, shard = 1 + rng() % 8;
    std::vector<std::uint64_t> entries(servers * shard);
    for (auto& e : entries)
      e = rng() % (servers * shard + (rng() % 8 == 0 ? 3 : 0));
    const std::uint64_t id = rng() % servers;
    ByteVec region = server_region(id, servers, shard, entries);
    if (rng() % 5 == 0)
      region.resize(rng() % region.size());
    ByteVec payload = u64s({rng() % (servers * shard + 1), rng() % 20, rng() % 3});
    if (rng() % 6 == 0)
      payload.resize(rng() % payload.size());
    for (const char* name : {"tsi", "chaser", "return_result"}) {
      Outcome ref = run_fn(shipped(name, profiles[0].name), payload, region, id, fnv1a64(name));
      for (std::size_t k = 1; k < profiles.size(); ++k)
        EXPECT_EQ(run_fn(shipped(name, profiles[k].name), payload, region, id, fnv1a64(name)), ref)
            << name << " on " << profiles[k].name << ": " << ref.describe();
    }
  }
}

TEST(CrossProfile, GeneratedProgramsAgree) {
  const auto profiles = standard_profiles();
  bitchain::test::ProgramGen gen(5);
  std::mt19937_64 rng(8);
  int compared = 0;
  for (int i = 0; i < 300; ++i) {
    CodeBlob b = assemble(gen.listing());
    if (!verify(b).ok())
      continue;
    ByteVec payload(rng() % 48), region(80);
    for (auto& x : payload)
      x = static_cast<std::uint8_t>(rng());
    for (auto& x : region)
      x = static_cast<std::uint8_t>(rng() % 4 ? 0 : rng());
    Outcome ref = run_fn(compile(b, profiles[0], CapabilityRegistry::all()), payload, region, 0);
    for (std::size_t k = 1; k < profiles.size(); ++k)
      EXPECT_EQ(run_fn(compile(b, profiles[k], CapabilityRegistry::all()), payload, region, 0), ref)
          << profiles[k].name << "\n"
          << disassemble(b);
    ++compared;
  }
  EXPECT_GT(compared, 200);
}
