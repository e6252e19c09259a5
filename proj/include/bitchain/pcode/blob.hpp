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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bitchain::pcode {

enum class Family : std::uint8_t { Le64 = 0, Be64 = 1 };

/// Identifies what a node can run; the analog of a target triple. Prelinked
/// images are only interchangeable between profiles with byte-equal names.
struct TargetProfile {
  std::string name;
  Family family = Family::Le64;
  bool fused_dispatch = false;

  /// Derives family and dispatch knob from a "<family>-<flavor>" name, e.g.
  /// "le64-generic" or "be64-fused". Throws Errc::invalid_profile.
  static TargetProfile named(std::string_view name);

  bool operator==(const TargetProfile&) const = default;
};

/// Checks the name rule: ASCII, 1..=32 bytes, no whitespace.
bool valid_profile_name(std::string_view name) noexcept;

/// Profiles used by tests and shipped archives.
std::vector<TargetProfile> standard_profiles();

struct CodeBlob {
  std::uint16_t locals_count = 0;
  std::vector<std::string> imports;
  ByteVec code;

  /// A pure blob imports nothing and is run without capability binding.
  bool pure() const noexcept { return imports.empty(); }

  bool operator==(const CodeBlob&) const = default;
};

// "PBC1" | u16 locals | u8 import_count | imports (u8 len, bytes) | u32 code_len | code
ByteVec encode_blob(const CodeBlob& blob);

/// Structural decode only; does not verify the code. Throws on bad magic,
/// truncation, or trailing bytes.
CodeBlob decode_blob(ByteSpan bytes);

} // namespace bitchain::pcode
