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

#include "bitchain/pcode/verifier.hpp"

#include "bitchain/pcode/isa.hpp"

#include <algorithm>

namespace bitchain::pcode {

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
  case ViolationKind::unknown_opcode: return "unknown opcode";
  case ViolationKind::truncated_instruction: return "truncated instruction";
  case ViolationKind::jump_out_of_bounds: return "jump out of bounds";
  case ViolationKind::misaligned_jump: return "misaligned jump target";
  case ViolationKind::stack_underflow: return "stack underflow";
  case ViolationKind::stack_overflow: return "stack overflow";
  case ViolationKind::inconsistent_stack: return "inconsistent stack height";
  case ViolationKind::falls_off_end: return "falls off end of code";
  case ViolationKind::bad_hostcall_slot: return "hostcall slot out of range";
  case ViolationKind::unknown_capability: return "unknown capability";
  case ViolationKind::bad_local: return "local index out of range";
  case ViolationKind::too_many_imports: return "too many imports";
  }
  return "unknown violation";
}

bool VerifyResult::has(ViolationKind kind) const noexcept {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::string VerifyResult::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty())
      out += "; ";
    out += std::string(to_string(v.kind)) + " at pc " + std::to_string(v.pc);
    if (!v.detail.empty())
      out += " (" + v.detail + ")";
  }
  return out;
}

namespace {

struct Decoded {
  std::uint32_t pc;
  Op op;
  std::uint32_t next;
  std::int64_t target = -1; // jumps only
  std::uint64_t operand = 0;
};

} // namespace

VerifyResult verify(const CodeBlob& blob) {
  VerifyResult result;
  auto fail = [&](ViolationKind k, std::uint32_t pc, std::string detail = {}) {
    result.violations.push_back({k, pc, std::move(detail)});
  };

  if (blob.imports.size() > kMaxImports)
    fail(ViolationKind::too_many_imports, 0, std::to_string(blob.imports.size()));
  for (const auto& name : blob.imports)
    if (!find_capability(name))
      fail(ViolationKind::unknown_capability, 0, name);

  const ByteVec& code = blob.code;
  const std::size_t n = code.size();
  std::vector<std::int32_t> index_of(n + 1, -1);
  std::vector<Decoded> instrs;

  // Pass 1: linear decode. Unreachable bytes must decode too.
  std::size_t pc = 0;
  while (pc < n) {
    const OpInfo* info = op_info(code[pc]);
    if (!info) {
      fail(ViolationKind::unknown_opcode, static_cast<std::uint32_t>(pc), std::to_string(code[pc]));
      return result;
    }
    if (pc + 1 + info->operand_size > n) {
      fail(ViolationKind::truncated_instruction, static_cast<std::uint32_t>(pc), std::string(info->mnemonic));
      return result;
    }
    Decoded d{static_cast<std::uint32_t>(pc), static_cast<Op>(code[pc]),
              static_cast<std::uint32_t>(pc + 1 + info->operand_size)};
    const std::uint8_t* arg = code.data() + pc + 1;
    switch (info->operand_size) {
    case 1: d.operand = arg[0]; break;
    case 2: d.operand = load_le<std::uint16_t>(arg); break;
    case 4: d.operand = load_le<std::uint32_t>(arg); break;
    case 8: d.operand = load_le<std::uint64_t>(arg); break;
    default: break;
    }
    if (is_jump(d.op))
      d.target = static_cast<std::int64_t>(d.next) + static_cast<std::int32_t>(d.operand);
    index_of[pc] = static_cast<std::int32_t>(instrs.size());
    instrs.push_back(d);
    pc = d.next;
  }

  // Pass 2: per-instruction static checks.
  for (const auto& d : instrs) {
    if (is_jump(d.op)) {
      if (d.target < 0 || d.target >= static_cast<std::int64_t>(n))
        fail(ViolationKind::jump_out_of_bounds, d.pc, "target " + std::to_string(d.target));
      else if (index_of[static_cast<std::size_t>(d.target)] < 0)
        fail(ViolationKind::misaligned_jump, d.pc, "target " + std::to_string(d.target));
    } else if (d.op == Op::HostCall) {
      if (d.operand >= blob.imports.size())
        fail(ViolationKind::bad_hostcall_slot, d.pc, "slot " + std::to_string(d.operand));
    } else if (d.op == Op::LdLoc || d.op == Op::StLoc) {
      if (d.operand >= blob.locals_count)
        fail(ViolationKind::bad_local, d.pc, "local " + std::to_string(d.operand));
    }
  }
  if (!result.ok())
    return result;

  if (instrs.empty()) {
    fail(ViolationKind::falls_off_end, 0, "empty code");
    return result;
  }

  // Pass 3: stack-height dataflow over reachable instructions.
  std::vector<std::int32_t> height(instrs.size(), -1);
  std::vector<std::size_t> work{0};
  height[0] = 0;
  std::int32_t max_height = 0;

  auto flow = [&](std::uint32_t from_pc, std::size_t to_pc, std::int32_t h) {
    if (to_pc >= n) {
      fail(ViolationKind::falls_off_end, from_pc);
      return;
    }
    auto idx = static_cast<std::size_t>(index_of[to_pc]);
    if (height[idx] < 0) {
      height[idx] = h;
      work.push_back(idx);
    } else if (height[idx] != h) {
      fail(ViolationKind::inconsistent_stack, static_cast<std::uint32_t>(to_pc),
           std::to_string(height[idx]) + " vs " + std::to_string(h));
    }
  };

  while (!work.empty()) {
    std::size_t i = work.back();
    work.pop_back();
    const Decoded& d = instrs[i];
    std::int32_t h = height[i];
    int pops = kOpTable[static_cast<std::size_t>(d.op)].pops;
    int pushes = kOpTable[static_cast<std::size_t>(d.op)].pushes;
    if (d.op == Op::HostCall) {
      const auto* sig = find_capability(blob.imports[d.operand]);
      pops = sig->pops;
      pushes = sig->pushes;
    }
    if (h < pops) {
      fail(ViolationKind::stack_underflow, d.pc,
           "needs " + std::to_string(pops) + ", has " + std::to_string(h));
      continue;
    }
    std::int32_t out = h - pops + pushes;
    if (out > static_cast<std::int32_t>(kMaxStack)) {
      fail(ViolationKind::stack_overflow, d.pc, "depth " + std::to_string(out));
      continue;
    }
    max_height = std::max(max_height, out);
    switch (d.op) {
    case Op::Halt: break;
    case Op::Jmp: flow(d.pc, static_cast<std::size_t>(d.target), out); break;
    case Op::Jz:
      flow(d.pc, d.next, out);
      flow(d.pc, static_cast<std::size_t>(d.target), out);
      break;
    default: flow(d.pc, d.next, out); break;
    }
  }

  result.max_stack = static_cast<std::uint16_t>(max_height);
  std::sort(result.violations.begin(), result.violations.end(),
            [](const Violation& a, const Violation& b) { return a.pc < b.pc; });
  return result;
}

} // namespace bitchain::pcode
