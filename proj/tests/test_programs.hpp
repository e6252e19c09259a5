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
#include "bitchain/pcode/assembler.hpp"

#include <fmt/core.h>

#include <random>
#include <string>
#include <vector>

namespace bitchain::test {

// Structured random listings: a bounded loop around straight-line blocks with
// forward conditional skips, so most outputs verify and terminate. Offsets
// are drawn so that some loads and stores go out of bounds and some
// divisions hit zero.
class ProgramGen {
public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  std::string listing() {
    out_.clear();
    labels_ = 0;
    line(".locals 4");
    line(".import chain.stage");
    line(".import chain.send_self");
    line(".import mem.get");
    line(fmt::format("PUSH {}", pick(1, 4)));
    line("STLOC 0");
    line("loop:");
    block(pick(2, 12));
    line("LDLOC 0");
    line("PUSH 1");
    line("SUB");
    line("DUP");
    line("STLOC 0");
    line("JZ end");
    line("JMP loop");
    line("end:");
    block(pick(1, 6));
    value();
    line("HALT");
    return out_;
  }

private:
  std::uint64_t pick(std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_); }
  void line(const std::string& s) { out_ += s + "\n"; }

  // Pushes exactly one value.
  void value(int nest = 0) {
    switch (nest > 3 ? pick(0, 2) : pick(0, 7)) {
    case 0: line(fmt::format("PUSH {}", pick(0, 3) == 0 ? rng_() : pick(0, 80))); break;
    case 1: line(fmt::format("LDLOC {}", pick(1, 3))); break;
    case 2: line(fmt::format("PUSH {}", pick(0, 40))); line(pick(0, 1) ? "PLD64" : "PLD8"); break;
    case 3: line(fmt::format("PUSH {}", 8 * pick(0, 9))); line(pick(0, 1) ? "LD64" : "LD8"); break;
    case 4: line("LDLOC 0"); break;
    default: {
      static const char* ops[] = {"ADD", "SUB", "MUL", "DIVU", "MODU", "EQ", "LTU", "AND", "OR", "XOR", "SHL", "SHRU"};
      value(nest + 1);
      if (pick(0, 2) == 0)
        line(fmt::format("PUSH {}", pick(0, 70)));
      else
        value(nest + 1);
      line(ops[pick(0, 11)]);
      break;
    }
    }
  }

  // Stack-neutral statements.
  void block(std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) {
      switch (pick(0, 6)) {
      case 0: value(); line(fmt::format("STLOC {}", pick(1, 3))); break;
      case 1: line(fmt::format("PUSH {}", 8 * pick(0, 9))); value(); line(pick(0, 1) ? "ST64" : "ST8"); break;
      case 2: value(); line("DUP"); line("DROP"); line("DROP"); break;
      case 3: {
        std::string skip = fmt::format("skip{}", labels_++);
        value();
        line("JZ " + skip);
        block(pick(1, 3));
        line(skip + ":");
        break;
      }
      case 4:
        line(fmt::format("PUSH {}", 8 * pick(0, 4)));
        value();
        line("HOSTCALL chain.stage");
        break;
      case 5:
        line(fmt::format("PUSH {}", pick(0, 2)));
        line(fmt::format("PUSH {}", 8 * pick(0, 8)));
        line("PUSH 8");
        line(fmt::format("PUSH {}", 8 * pick(0, 9)));
        line("HOSTCALL mem.get");
        line("DROP");
        break;
      default:
        if (pick(0, 4) == 0) {
          line(fmt::format("PUSH {}", pick(0, 2)));
          line(fmt::format("PUSH {}", 8 * pick(0, 4)));
          line("HOSTCALL chain.send_self");
        } else {
          value();
          line("DROP");
        }
        break;
      }
    }
  }

  std::mt19937_64 rng_;
  std::string out_;
  int labels_ = 0;
};

// Host stub that logs every capability call and answers GETs from a
// deterministic function of the arguments.
class RecordingHost final : public exec::HostServices {
public:
  std::vector<std::string> log;

  void send_self(std::uint64_t dest, ByteSpan payload) override {
    log.push_back(fmt::format("send_self {} {}", dest, hex(payload)));
  }
  void send(std::uint64_t type_id, std::uint64_t dest, ByteSpan payload) override {
    log.push_back(fmt::format("send {} {} {}", type_id, dest, hex(payload)));
  }
  ByteVec mem_get(std::uint64_t node, std::uint64_t off, std::uint64_t len) override {
    log.push_back(fmt::format("get {} {} {}", node, off, len));
    if (node > 2)
      throw Error(Errc::unknown_endpoint, "node " + std::to_string(node));
    ByteVec v(len);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = static_cast<std::uint8_t>(node * 31 + off + i);
    return v;
  }
  void mem_put(std::uint64_t node, ByteSpan bytes, std::uint64_t off) override {
    log.push_back(fmt::format("put {} {} {}", node, off, hex(bytes)));
  }

private:
  static std::string hex(ByteSpan b) {
    std::string s;
    for (auto c : b)
      s += fmt::format("{:02x}", c);
    return s;
  }
};

struct Outcome {
  exec::ExitStatus status;
  ByteVec region;
  std::vector<std::string> log;
  exec::HostcallCounters counters;

  std::string describe() const {
    std::string s = status.ok() ? fmt::format("halt {}", *status.code)
                                : fmt::format("trap {} at {}", exec::to_string(status.trap->kind), status.trap->pc);
    return s + fmt::format(", {} hostcalls", log.size());
  }
  bool operator==(const Outcome& o) const {
    bool same_status = status.ok() == o.status.ok() &&
                       (status.ok() ? *status.code == *o.status.code
                                    : status.trap->kind == o.status.trap->kind && status.trap->pc == o.status.trap->pc);
    return same_status && region == o.region && log == o.log && counters.by_capability == o.counters.by_capability;
  }
};

inline Outcome run_fn(const pcode::CompiledFunction& fn, ByteSpan payload, ByteVec region, std::uint64_t node_id,
                      std::optional<std::uint64_t> type = 1, std::uint64_t fuel = exec::kDefaultFuel) {
  RecordingHost host;
  exec::HostEnv env;
  env.node_id = node_id;
  env.services = &host;
  env.current_type = type;
  Outcome o;
  o.status = exec::execute(fn, payload, region, env, fuel);
  o.region = std::move(region);
  o.log = std::move(host.log);
  o.counters = env.counters;
  return o;
}

} // namespace bitchain::test
