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

#include <string>
#include <string_view>

namespace bitchain::pcode {

// Line-oriented assembler for ifunc listings.
//
//   ; comment (also '#')
//   .locals N            number of u64 locals
//   .import name         capability import; HOSTCALL may name it directly
//   .fill N MNEMONIC     N copies of an operand-less instruction
//   label:               may share a line with an instruction
//   PUSH 42 | PUSH 0x2a | PUSH -1 | PUSH typeid(return_result)
//   JMP label / JZ label / LDLOC 3 / HOSTCALL chain.send_self
//
// Mnemonics are case-insensitive. Errors carry the 1-based line number.
CodeBlob assemble(std::string_view source);

/// Renders a listing that assembles back to the same blob. Jump targets get
/// synthetic labels of the form L<offset>.
std::string disassemble(const CodeBlob& blob);

} // namespace bitchain::pcode
