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

#include <vector>

namespace bitchain::exec {

using pcode::Capability;
using pcode::Op;

std::string_view to_string(TrapKind kind) noexcept {
  switch (kind) {
  case TrapKind::memory_out_of_bounds: return "memory out of bounds";
  case TrapKind::division_by_zero: return "division by zero";
  case TrapKind::fuel_exhausted: return "fuel exhausted";
  case TrapKind::hostcall_failed: return "hostcall failed";
  case TrapKind::stack_fault: return "stack fault";
  case TrapKind::invalid_instruction: return "invalid instruction";
  }
  return "unknown trap";
}

namespace {

inline bool in_bounds(std::uint64_t off, std::uint64_t len, std::size_t size) noexcept {
  return off <= size && len <= size - off;
}

// Returns false on division by zero.
inline bool arith(Op op, std::uint64_t a, std::uint64_t b, std::uint64_t& out) noexcept {
  switch (op) {
  case Op::Add: out = a + b; return true;
  case Op::Sub: out = a - b; return true;
  case Op::Mul: out = a * b; return true;
  case Op::DivU:
    if (b == 0)
      return false;
    out = a / b;
    return true;
  case Op::ModU:
    if (b == 0)
      return false;
    out = a % b;
    return true;
  case Op::Eq: out = a == b; return true;
  case Op::LtU: out = a < b; return true;
  case Op::And: out = a & b; return true;
  case Op::Or: out = a | b; return true;
  case Op::Xor: out = a ^ b; return true;
  case Op::Shl: out = a << (b & 63); return true;
  case Op::ShrU: out = a >> (b & 63); return true;
  default: out = 0; return true;
  }
}

} // namespace

ExitStatus execute(const pcode::CompiledFunction& fn, ByteSpan payload, MutableByteSpan region, HostEnv& env,
                   std::uint64_t fuel) {
  if (!fn.dispatch || fn.dispatch->empty())
    return ExitStatus::trapped(TrapKind::invalid_instruction, 0, "no dispatch");
  const pcode::Dispatch& code = *fn.dispatch;
  const std::size_t n = code.size();

  std::array<std::uint64_t, pcode::kMaxStack> stack;
  std::size_t sp = 0;
  std::vector<std::uint64_t> locals(fn.locals_count, 0);

#define BC_NEED(k)                                                                                                     \
  if (sp < (k))                                                                                                        \
    return ExitStatus::trapped(TrapKind::stack_fault, ins.pc, "underflow");
#define BC_ROOM(k)                                                                                                     \
  if (sp + (k) > stack.size())                                                                                         \
    return ExitStatus::trapped(TrapKind::stack_fault, ins.pc, "overflow");

  std::size_t ip = 0;
  for (;;) {
    if (ip >= n)
      return ExitStatus::trapped(TrapKind::invalid_instruction, n ? code[n - 1].pc : 0, "fell off end");
    const pcode::Instr& ins = code[ip];
    if (fuel < ins.fuel)
      return ExitStatus::trapped(TrapKind::fuel_exhausted, fuel == 0 ? ins.pc : ins.aux_pc);
    fuel -= ins.fuel;
    ++ip;

    if (pcode::is_fused(ins.op)) {
      auto op = static_cast<Op>(static_cast<std::uint8_t>(Op::Add) + (ins.op - pcode::kFusedBase));
      BC_NEED(1);
      std::uint64_t out;
      if (!arith(op, stack[sp - 1], ins.operand, out))
        return ExitStatus::trapped(TrapKind::division_by_zero, ins.aux_pc);
      stack[sp - 1] = out;
      continue;
    }

    switch (static_cast<Op>(ins.op)) {
    case Op::Halt:
      BC_NEED(1);
      return ExitStatus::halted(stack[sp - 1]);
    case Op::Push:
      BC_ROOM(1);
      stack[sp++] = ins.operand;
      break;
    case Op::Drop:
      BC_NEED(1);
      --sp;
      break;
    case Op::Dup:
      BC_NEED(1);
      BC_ROOM(1);
      stack[sp] = stack[sp - 1];
      ++sp;
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::DivU:
    case Op::ModU:
    case Op::Eq:
    case Op::LtU:
    case Op::And:
    case Op::Or:
    case Op::Xor:
    case Op::Shl:
    case Op::ShrU: {
      BC_NEED(2);
      std::uint64_t out;
      if (!arith(static_cast<Op>(ins.op), stack[sp - 2], stack[sp - 1], out))
        return ExitStatus::trapped(TrapKind::division_by_zero, ins.pc);
      stack[sp - 2] = out;
      --sp;
      break;
    }
    case Op::Jmp: ip = ins.operand; break;
    case Op::Jz:
      BC_NEED(1);
      if (stack[--sp] == 0)
        ip = ins.operand;
      break;
    case Op::LdLoc:
      BC_ROOM(1);
      if (ins.operand >= locals.size())
        return ExitStatus::trapped(TrapKind::invalid_instruction, ins.pc, "bad local");
      stack[sp++] = locals[ins.operand];
      break;
    case Op::StLoc:
      BC_NEED(1);
      if (ins.operand >= locals.size())
        return ExitStatus::trapped(TrapKind::invalid_instruction, ins.pc, "bad local");
      locals[ins.operand] = stack[--sp];
      break;
    case Op::Ld8:
    case Op::Ld64:
    case Op::Pld8:
    case Op::Pld64: {
      BC_NEED(1);
      auto op = static_cast<Op>(ins.op);
      bool wide = op == Op::Ld64 || op == Op::Pld64;
      ByteSpan src = (op == Op::Ld8 || op == Op::Ld64) ? ByteSpan(region) : payload;
      std::uint64_t off = stack[sp - 1];
      std::size_t len = wide ? 8 : 1;
      if (!in_bounds(off, len, src.size()))
        return ExitStatus::trapped(TrapKind::memory_out_of_bounds, ins.pc,
                                   "offset " + std::to_string(off) + " size " + std::to_string(src.size()));
      stack[sp - 1] = wide ? load_le<std::uint64_t>(src.data() + off) : src[off];
      break;
    }
    case Op::St8:
    case Op::St64: {
      BC_NEED(2);
      bool wide = static_cast<Op>(ins.op) == Op::St64;
      std::uint64_t value = stack[sp - 1];
      std::uint64_t off = stack[sp - 2];
      sp -= 2;
      if (!in_bounds(off, wide ? 8 : 1, region.size()))
        return ExitStatus::trapped(TrapKind::memory_out_of_bounds, ins.pc,
                                   "offset " + std::to_string(off) + " size " + std::to_string(region.size()));
      if (wide)
        store_le<std::uint64_t>(region.data() + off, value);
      else
        region[off] = static_cast<std::uint8_t>(value);
      break;
    }
    case Op::HostCall: {
      if (ins.operand >= fn.bound_capabilities.size())
        return ExitStatus::trapped(TrapKind::invalid_instruction, ins.pc, "unbound slot");
      Capability cap = fn.bound_capabilities[ins.operand];
      const auto& sig = pcode::signature(cap);
      BC_NEED(sig.pops);
      const std::uint64_t* args = &stack[sp - sig.pops];
      sp -= sig.pops;
      ++env.counters.by_capability[static_cast<std::size_t>(cap)];
      try {
        switch (cap) {
        case Capability::Stage:
          if (!in_bounds(args[0], 8, kStagingSize))
            return ExitStatus::trapped(TrapKind::memory_out_of_bounds, ins.pc, "staging offset");
          store_le<std::uint64_t>(env.staging.data() + args[0], args[1]);
          break;
        case Capability::SendSelf:
          if (!in_bounds(0, args[1], kStagingSize))
            return ExitStatus::trapped(TrapKind::memory_out_of_bounds, ins.pc, "staging length");
          if (!env.current_type)
            return ExitStatus::trapped(TrapKind::hostcall_failed, ins.pc, "send_self outside an ifunc");
          if (!env.services)
            return ExitStatus::trapped(TrapKind::hostcall_failed, ins.pc, "no host services");
          env.services->send_self(args[0], ByteSpan(env.staging.data(), args[1]));
          break;
        case Capability::Send:
          if (!in_bounds(0, args[2], kStagingSize))
            return ExitStatus::trapped(TrapKind::memory_out_of_bounds, ins.pc, "staging length");
          if (!env.services)
            return ExitStatus::trapped(TrapKind::hostcall_failed, ins.pc, "no host services");
          env.services->send(args[0], args[1], ByteSpan(env.staging.data(), args[2]));
          break;
        case Capability::MemGet: {
          // node, remote_off, len, local_off
          if (!in_bounds(args[3], args[2], region.size()))
            return ExitStatus::trapped(TrapKind::memory_out_of_bounds, ins.pc, "mem.get local range");
          if (!env.services)
            return ExitStatus::trapped(TrapKind::hostcall_failed, ins.pc, "no host services");
          ByteVec data = env.services->mem_get(args[0], args[1], args[2]);
          if (data.size() != args[2])
            return ExitStatus::trapped(TrapKind::hostcall_failed, ins.pc, "short get");
          std::copy(data.begin(), data.end(), region.begin() + static_cast<std::ptrdiff_t>(args[3]));
          stack[sp++] = 0;
          break;
        }
        case Capability::MemPut: {
          // node, local_off, len, remote_off
          if (!in_bounds(args[1], args[2], region.size()))
            return ExitStatus::trapped(TrapKind::memory_out_of_bounds, ins.pc, "mem.put local range");
          if (!env.services)
            return ExitStatus::trapped(TrapKind::hostcall_failed, ins.pc, "no host services");
          env.services->mem_put(args[0], ByteSpan(region.data() + args[1], args[2]), args[3]);
          stack[sp++] = 0;
          break;
        }
        }
      } catch (const Error& e) {
        return ExitStatus::trapped(TrapKind::hostcall_failed, ins.pc, e.what());
      }
      break;
    }
    default: return ExitStatus::trapped(TrapKind::invalid_instruction, ins.pc, std::to_string(ins.op));
    }
  }
#undef BC_NEED
#undef BC_ROOM
}

} // namespace bitchain::exec
