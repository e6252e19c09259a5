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

#include "bitchain/pcode/archive.hpp"

#include "bitchain/pcode/verifier.hpp"

#include <algorithm>
#include <set>

namespace bitchain::pcode {

namespace {

constexpr std::uint8_t kArchiveMagic[4] = {'P', 'B', 'C', 'A'};

std::vector<std::string> union_of_imports(const std::vector<Variant>& variants) {
  std::set<std::string> all;
  for (const auto& v : variants)
    all.insert(v.blob.imports.begin(), v.blob.imports.end());
  return {all.begin(), all.end()};
}

void check_names(const std::vector<Variant>& variants) {
  std::set<std::string_view> seen;
  for (const auto& v : variants) {
    if (!valid_profile_name(v.profile_name))
      throw Error(Errc::invalid_profile, "bad variant profile name '" + v.profile_name + "'");
    if (!seen.insert(v.profile_name).second)
      throw Error(Errc::duplicate_profile, v.profile_name);
  }
}

} // namespace

ByteVec build_archive(const std::vector<Variant>& variants) {
  if (variants.empty())
    throw Error(Errc::empty_archive, "archive needs at least one variant");
  check_names(variants);
  for (const auto& v : variants) {
    VerifyResult vr = verify(v.blob);
    if (!vr.ok())
      throw Error(Errc::verify_failed, "variant '" + v.profile_name + "': " + vr.summary());
  }
  FatArchive archive;
  archive.variants = variants;
  archive.deps = union_of_imports(variants);
  return encode_archive(archive);
}

ByteVec encode_archive(const FatArchive& archive) {
  if (archive.variants.size() > UINT16_MAX || archive.deps.size() > UINT16_MAX)
    throw Error(Errc::length_overflow, "too many variants or deps");
  ByteWriter w;
  w.bytes(kArchiveMagic);
  w.u32(archive.format_version);
  w.u16(static_cast<std::uint16_t>(archive.variants.size()));
  w.u16(static_cast<std::uint16_t>(archive.deps.size()));
  for (const auto& d : archive.deps)
    w.short_string(d);
  for (const auto& v : archive.variants) {
    w.short_string(v.profile_name);
    ByteVec blob = encode_blob(v.blob);
    w.u32(static_cast<std::uint32_t>(blob.size()));
    w.bytes(blob);
  }
  return std::move(w).take();
}

FatArchive parse_archive(ByteSpan bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 4 || !std::equal(kArchiveMagic, kArchiveMagic + 4, bytes.begin()))
    throw Error(Errc::bad_magic, "archive does not start with PBCA");
  r.bytes(4);
  FatArchive archive;
  archive.format_version = r.u32();
  if (archive.format_version != kArchiveVersion)
    throw Error(Errc::unsupported_version, "archive version " + std::to_string(archive.format_version));
  std::size_t n_variants = r.u16();
  std::size_t n_deps = r.u16();
  if (n_variants == 0)
    throw Error(Errc::empty_archive, "archive declares zero variants");
  for (std::size_t i = 0; i < n_deps; ++i)
    archive.deps.push_back(r.short_string());
  for (std::size_t i = 0; i < n_variants; ++i) {
    Variant v;
    v.profile_name = r.short_string();
    std::uint32_t len = r.u32();
    if (len > r.remaining())
      throw Error(Errc::length_overflow, "variant '" + v.profile_name + "' blob_len " + std::to_string(len) +
                                            " exceeds " + std::to_string(r.remaining()) + " remaining");
    v.blob = decode_blob(r.bytes(len));
    archive.variants.push_back(std::move(v));
  }
  if (!r.done())
    throw Error(Errc::malformed, std::to_string(r.remaining()) + " trailing bytes after archive");
  check_names(archive.variants);
  if (!std::is_sorted(archive.deps.begin(), archive.deps.end()) ||
      std::adjacent_find(archive.deps.begin(), archive.deps.end()) != archive.deps.end())
    throw Error(Errc::malformed, "deps are not sorted and unique");
  for (const auto& v : archive.variants)
    for (const auto& imp : v.blob.imports)
      if (!std::binary_search(archive.deps.begin(), archive.deps.end(), imp))
        throw Error(Errc::malformed, "import '" + imp + "' of variant '" + v.profile_name + "' missing from deps");
  return archive;
}

const CodeBlob& select_variant(const FatArchive& archive, const TargetProfile& profile) {
  const Variant* any = nullptr;
  for (const auto& v : archive.variants) {
    if (v.profile_name == profile.name)
      return v.blob;
    if (v.profile_name == kAnyProfile)
      any = &v;
  }
  if (any)
    return any->blob;
  std::string names;
  for (const auto& v : archive.variants)
    names += (names.empty() ? "" : ", ") + v.profile_name;
  throw Error(Errc::no_matching_variant, "local profile '" + profile.name + "', archive has [" + names + "]");
}

} // namespace bitchain::pcode
