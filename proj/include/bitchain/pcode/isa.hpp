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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace bitchain::pcode {

// Opcode bytes of the portable instruction set. Operands follow the opcode
// byte, little-endian. All stack values are 64-bit.
enum class Op : std::uint8_t {
  Halt = 0x00,
  Push = 0x01,
  Drop = 0x02,
  Dup = 0x03,
  Add = 0x04,
  Sub = 0x05,
  Mul = 0x06,
  DivU = 0x07,
  ModU = 0x08,
  Eq = 0x09,
  LtU = 0x0A,
  And = 0x0B,
  Or = 0x0C,
  Xor = 0x0D,
  Shl = 0x0E,
  ShrU = 0x0F,
  Jmp = 0x10,
  Jz = 0x11,
  LdLoc = 0x12,
  StLoc = 0x13,
  Ld8 = 0x14,
  Ld64 = 0x15,
  St8 = 0x16,
  St64 = 0x17,
  Pld8 = 0x18,
  Pld64 = 0x19,
  HostCall = 0x1A,
};

inline constexpr std::uint8_t kOpCount = 0x1B;
inline constexpr std::size_t kMaxStack = 1024;
inline constexpr std::size_t kMaxImports = 255;

struct OpInfo {
  std::string_view mnemonic;
  std::uint8_t operand_size;
  // Stack effect. HOSTCALL is listed as 0/0; its effect comes from the
  // capability signature.
  std::uint8_t pops;
  std::uint8_t pushes;
};

inline constexpr std::array<OpInfo, kOpCount> kOpTable{{
    {"HALT", 0, 1, 0},  {"PUSH", 8, 0, 1},  {"DROP", 0, 1, 0},  {"DUP", 0, 1, 2},
    {"ADD", 0, 2, 1},   {"SUB", 0, 2, 1},   {"MUL", 0, 2, 1},   {"DIVU", 0, 2, 1},
    {"MODU", 0, 2, 1},  {"EQ", 0, 2, 1},    {"LTU", 0, 2, 1},   {"AND", 0, 2, 1},
    {"OR", 0, 2, 1},    {"XOR", 0, 2, 1},   {"SHL", 0, 2, 1},   {"SHRU", 0, 2, 1},
    {"JMP", 4, 0, 0},   {"JZ", 4, 1, 0},    {"LDLOC", 2, 0, 1}, {"STLOC", 2, 1, 0},
    {"LD8", 0, 1, 1},   {"LD64", 0, 1, 1},  {"ST8", 0, 2, 0},   {"ST64", 0, 2, 0},
    {"PLD8", 0, 1, 1},  {"PLD64", 0, 1, 1}, {"HOSTCALL", 1, 0, 0},
}};

inline const OpInfo* op_info(std::uint8_t opcode) noexcept {
  return opcode < kOpCount ? &kOpTable[opcode] : nullptr;
}

inline constexpr bool is_binary_arith(Op op) noexcept {
  return op >= Op::Add && op <= Op::ShrU;
}

inline constexpr bool is_jump(Op op) noexcept { return op == Op::Jmp || op == Op::Jz; }

// Host capabilities an ifunc may import. Arguments are pushed left to right,
// so the last argument is on top of the stack.
enum class Capability : std::uint8_t { Stage, SendSelf, Send, MemGet, MemPut };

struct CapabilitySignature {
  Capability capability;
  std::string_view name;
  std::uint8_t pops;
  std::uint8_t pushes;
};

inline constexpr std::array<CapabilitySignature, 5> kCapabilities{{
    {Capability::Stage, "chain.stage", 2, 0},
    {Capability::SendSelf, "chain.send_self", 2, 0},
    {Capability::Send, "chain.send", 3, 0},
    {Capability::MemGet, "mem.get", 4, 1},
    {Capability::MemPut, "mem.put", 4, 1},
}};

inline const CapabilitySignature* find_capability(std::string_view name) noexcept {
  for (const auto& c : kCapabilities)
    if (c.name == name)
      return &c;
  return nullptr;
}

inline const CapabilitySignature& signature(Capability c) noexcept {
  return kCapabilities[static_cast<std::size_t>(c)];
}

} // namespace bitchain::pcode
