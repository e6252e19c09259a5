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
#include <vector>

namespace bitchain::pcode {

inline constexpr std::uint32_t kArchiveVersion = 1;
inline constexpr std::string_view kAnyProfile = "any";

struct Variant {
  std::string profile_name;
  CodeBlob blob;

  bool operator==(const Variant&) const = default;
};

/// Multi-target container: one blob per profile plus the sorted union of all
/// capability imports.
struct FatArchive {
  std::uint32_t format_version = kArchiveVersion;
  std::vector<Variant> variants;
  std::vector<std::string> deps;

  bool operator==(const FatArchive&) const = default;
};

/// Verifies every blob and emits the PBCA container. deps are computed here.
/// Throws Errc::empty_archive, Errc::duplicate_profile, Errc::verify_failed.
ByteVec build_archive(const std::vector<Variant>& variants);

/// Encodes an already-formed archive without re-verifying.
ByteVec encode_archive(const FatArchive& archive);

/// Safe on arbitrary input. Throws Errc::bad_magic, Errc::unsupported_version,
/// Errc::truncated, Errc::length_overflow or Errc::malformed.
FatArchive parse_archive(ByteSpan bytes);

/// Exact profile-name match first, then the "any" variant.
/// Throws Errc::no_matching_variant naming the local profile and what exists.
const CodeBlob& select_variant(const FatArchive& archive, const struct TargetProfile& profile);

} // namespace bitchain::pcode
