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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bitchain::pcode {

enum class ViolationKind {
  unknown_opcode,
  truncated_instruction,
  jump_out_of_bounds,
  misaligned_jump,
  stack_underflow,
  stack_overflow,
  inconsistent_stack,
  falls_off_end,
  bad_hostcall_slot,
  unknown_capability,
  bad_local,
  too_many_imports,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::uint32_t pc;
  std::string detail;
};

struct VerifyResult {
  std::uint16_t max_stack = 0;
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const noexcept;
  std::string summary() const;
};

/// Accepts iff every jump lands on an instruction boundary inside the code,
/// every reachable path keeps the operand stack within [0, kMaxStack], every
/// path ends in HALT or a jump, and every HOSTCALL/LDLOC/STLOC index is in
/// range. Unreachable bytes must still decode. Runs in O(code size).
VerifyResult verify(const CodeBlob& blob);

} // namespace bitchain::pcode
