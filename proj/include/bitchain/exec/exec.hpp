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
#include "bitchain/pcode/compiler.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace bitchain::exec {

inline constexpr std::uint64_t kDefaultFuel = 1'000'000;
inline constexpr std::size_t kStagingSize = 4096;

// Fixed layout of the target region on pointer-chase servers.
namespace layout {
inline constexpr std::size_t kNodeId = 0;
inline constexpr std::size_t kNumServers = 8;
inline constexpr std::size_t kShardSize = 16;
inline constexpr std::size_t kReserved = 24;
inline constexpr std::size_t kEntries = 32;
} // namespace layout

enum class TrapKind {
  memory_out_of_bounds,
  division_by_zero,
  fuel_exhausted,
  hostcall_failed,
  stack_fault,
  invalid_instruction,
};

std::string_view to_string(TrapKind kind) noexcept;

struct Trap {
  TrapKind kind;
  std::uint32_t pc;
  std::string detail;
};

/// Exactly one of code / trap is set.
struct ExitStatus {
  std::optional<std::uint64_t> code;
  std::optional<Trap> trap;

  bool ok() const noexcept { return code.has_value(); }
  static ExitStatus halted(std::uint64_t c) { return {c, std::nullopt}; }
  static ExitStatus trapped(TrapKind k, std::uint32_t pc, std::string detail = {}) {
    return {std::nullopt, Trap{k, pc, std::move(detail)}};
  }
};

/// Network-facing capabilities, implemented by the hosting node. Failures are
/// reported by throwing bitchain::Error and surface as hostcall_failed traps.
class HostServices {
public:
  virtual ~HostServices() = default;
  virtual void send_self(std::uint64_t dest_node, ByteSpan payload) = 0;
  virtual void send(std::uint64_t type_id, std::uint64_t dest_node, ByteSpan payload) = 0;
  virtual ByteVec mem_get(std::uint64_t node, std::uint64_t remote_off, std::uint64_t len) = 0;
  virtual void mem_put(std::uint64_t node, ByteSpan bytes, std::uint64_t remote_off) = 0;
};

struct HostcallCounters {
  std::array<std::uint64_t, pcode::kCapabilities.size()> by_capability{};

  std::uint64_t operator[](pcode::Capability c) const noexcept {
    return by_capability[static_cast<std::size_t>(c)];
  }
  std::uint64_t total() const noexcept {
    std::uint64_t t = 0;
    for (auto v : by_capability)
      t += v;
    return t;
  }
};

/// Per-execution host environment. Not shared between concurrent executions.
struct HostEnv {
  std::uint64_t node_id = 0;
  std::array<std::uint8_t, kStagingSize> staging{};
  HostServices* services = nullptr;
  // Set when running as an ifunc; send_self is refused otherwise.
  std::optional<std::uint64_t> current_type;
  HostcallCounters counters;
};

/// Runs fn until HALT, a trap, or fuel exhaustion. The payload is read-only;
/// region is the node's target context. Every access to payload, region,
/// staging, locals and stack is bounds-checked. Each source instruction costs
/// one unit of fuel, so fused and unfused dispatch consume identical fuel.
ExitStatus execute(const pcode::CompiledFunction& fn, ByteSpan payload, MutableByteSpan region, HostEnv& env,
                   std::uint64_t fuel = kDefaultFuel);

} // namespace bitchain::exec
