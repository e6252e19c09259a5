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

#include "bitchain/pcode/blob.hpp"

#include <cctype>

namespace bitchain::pcode {

namespace {
constexpr std::uint8_t kBlobMagic[4] = {'P', 'B', 'C', '1'};
} // namespace

bool valid_profile_name(std::string_view name) noexcept {
  if (name.empty() || name.size() > 32)
    return false;
  for (char c : name) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x21 || u > 0x7E)
      return false;
  }
  return true;
}

TargetProfile TargetProfile::named(std::string_view name) {
  if (!valid_profile_name(name))
    throw Error(Errc::invalid_profile, "bad profile name '" + std::string(name) + "'");
  TargetProfile p;
  p.name = std::string(name);
  if (name.starts_with("le64"))
    p.family = Family::Le64;
  else if (name.starts_with("be64"))
    p.family = Family::Be64;
  else
    throw Error(Errc::invalid_profile, "profile '" + p.name + "' has no le64/be64 family prefix");
  p.fused_dispatch = name.find("fused") != std::string_view::npos;
  return p;
}

std::vector<TargetProfile> standard_profiles() {
  return {TargetProfile::named("le64-generic"), TargetProfile::named("le64-fused"),
          TargetProfile::named("be64-generic")};
}

ByteVec encode_blob(const CodeBlob& blob) {
  if (blob.imports.size() > 255)
    throw Error(Errc::too_many_imports, std::to_string(blob.imports.size()) + " imports");
  ByteWriter w;
  w.bytes(kBlobMagic);
  w.u16(blob.locals_count);
  w.u8(static_cast<std::uint8_t>(blob.imports.size()));
  for (const auto& name : blob.imports)
    w.short_string(name);
  if (blob.code.size() > UINT32_MAX)
    throw Error(Errc::length_overflow, "code section too large");
  w.u32(static_cast<std::uint32_t>(blob.code.size()));
  w.bytes(blob.code);
  return std::move(w).take();
}

CodeBlob decode_blob(ByteSpan bytes) {
  ByteReader r(bytes);
  ByteSpan magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kBlobMagic))
    throw Error(Errc::bad_magic, "code blob does not start with PBC1");
  CodeBlob blob;
  blob.locals_count = r.u16();
  std::size_t n_imports = r.u8();
  blob.imports.reserve(n_imports);
  for (std::size_t i = 0; i < n_imports; ++i)
    blob.imports.push_back(r.short_string());
  std::uint32_t code_len = r.u32();
  if (code_len > r.remaining())
    throw Error(Errc::length_overflow,
                "code_len " + std::to_string(code_len) + " exceeds " + std::to_string(r.remaining()) + " remaining");
  ByteSpan code = r.bytes(code_len);
  blob.code.assign(code.begin(), code.end());
  if (!r.done())
    throw Error(Errc::malformed, std::to_string(r.remaining()) + " trailing bytes after code blob");
  return blob;
}

} // namespace bitchain::pcode
