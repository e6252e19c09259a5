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

#include "bitchain/pcode/blob.hpp"
#include "bitchain/pcode/isa.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace bitchain::pcode {

/// The set of host capabilities a node is willing to bind. Plays the role of
/// the shared libraries available on a target: a missing one fails deployment.
class CapabilityRegistry {
public:
  static CapabilityRegistry all();
  static CapabilityRegistry none() { return {}; }

  CapabilityRegistry& add(std::string_view name);
  CapabilityRegistry& remove(std::string_view name);
  const CapabilitySignature* resolve(std::string_view name) const noexcept;

private:
  std::array<bool, kCapabilities.size()> present_{};
};

// Decoded dispatch opcodes. Values below kOpCount mirror Op; the fused
// PUSH+arith forms only appear for profiles with fused_dispatch.
enum class DOp : std::uint8_t {
  AddI = 0x40,
  SubI,
  MulI,
  DivUI,
  ModUI,
  EqI,
  LtUI,
  AndI,
  OrI,
  XorI,
  ShlI,
  ShrUI,
};

inline constexpr std::uint8_t kFusedBase = static_cast<std::uint8_t>(DOp::AddI);
inline constexpr std::uint8_t kFusedEnd = static_cast<std::uint8_t>(DOp::ShrUI) + 1;

inline constexpr bool is_fused(std::uint8_t op) noexcept { return op >= kFusedBase && op < kFusedEnd; }

/// One decoded instruction. Jump operands are instruction indices, not byte
/// offsets. pc is the source byte offset (for traps); a fused instruction
/// keeps the PUSH offset in pc and the arithmetic offset in aux_pc. The
/// layout has no implicit padding: prelinked images store it verbatim in the
/// profile family's byte order.
struct Instr {
  std::uint8_t op = 0;
  std::uint8_t fuel = 1;
  std::uint16_t reserved0 = 0;
  std::uint32_t pc = 0;
  std::uint32_t aux_pc = 0;
  std::uint32_t reserved1 = 0;
  std::uint64_t operand = 0;
  bool operator==(const Instr&) const = default;
};
static_assert(sizeof(Instr) == 24 && std::is_trivially_copyable_v<Instr>);

using Dispatch = std::vector<Instr>;

struct CompiledFunction {
  std::uint64_t type_id = 0;
  TargetProfile profile;
  std::shared_ptr<const Dispatch> dispatch;
  std::uint16_t locals_count = 0;
  std::uint16_t max_stack = 0;
  std::vector<std::string> imports;
  std::vector<Capability> bound_capabilities;
  std::uint64_t compile_cost_ns = 0;  // 0 for loaded images

  bool pure() const noexcept { return imports.empty(); }
};

/// Target-specific, ready-to-run form of a compiled function. Multi-byte
/// fields inside serialized_dispatch use the profile family's byte order.
struct PrelinkedImage {
  std::string profile_name;
  ByteVec serialized_dispatch;
  std::uint16_t locals_count = 0;
  std::uint16_t max_stack = 0;
  std::vector<std::string> imports;

  bool operator==(const PrelinkedImage&) const = default;
};

/// Verifies, decodes reachable code, optionally fuses PUSH+arith pairs and
/// binds capabilities. Throws Errc::verify_failed or
/// Errc::unresolved_capability (listing every missing name).
CompiledFunction compile(const CodeBlob& blob, const TargetProfile& profile,
                         const CapabilityRegistry& capabilities, std::uint64_t type_id = 0);

PrelinkedImage prelink(const CompiledFunction& fn);

/// Structural checks and capability binding only; no verification pass.
/// Throws Errc::profile_mismatch when the image was built for another profile.
CompiledFunction load_prelinked(const PrelinkedImage& image, const TargetProfile& profile,
                                const CapabilityRegistry& capabilities, std::uint64_t type_id = 0);

// "PBIN" | u8 family | profile name | u16 locals | u16 max_stack | imports | u32 len | dispatch
ByteVec encode_prelinked(const PrelinkedImage& image);
PrelinkedImage decode_prelinked(ByteSpan bytes);

} // namespace bitchain::pcode
