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

// bitchain-asm: assembles ifunc listings into fat archives and prelinked
// images, and inspects existing archives.

#include "bitchain/pcode.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fs = std::filesystem;
using namespace bitchain;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      out.push_back(item);
  return out;
}

ByteVec read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw Error(Errc::not_found, "cannot open " + p.string());
  return ByteVec(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& p, const ByteVec& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw Error(Errc::io, "cannot write " + p.string());
}

int build(const fs::path& src, const fs::path& out_dir, std::string name, const std::string& variants,
          const std::string& prelink) {
  auto text = read_bytes(src);
  pcode::CodeBlob blob = pcode::assemble(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
  if (name.empty())
    name = src.stem().string();

  std::vector<pcode::Variant> vs;
  for (const auto& p : split_list(variants))
    vs.push_back({p, blob});
  ByteVec archive = pcode::build_archive(vs);
  fs::create_directories(out_dir);
  write_bytes(out_dir / (name + ".pbca"), archive);
  fmt::print("{}: {} bytes, {} variant(s)\n", (out_dir / (name + ".pbca")).string(), archive.size(), vs.size());

  auto parsed = pcode::parse_archive(archive);
  for (const auto& p : split_list(prelink)) {
    auto profile = pcode::TargetProfile::named(p);
    auto fn = pcode::compile(pcode::select_variant(parsed, profile), profile, pcode::CapabilityRegistry::all(),
                             fnv1a64(name));
    ByteVec image = pcode::encode_prelinked(pcode::prelink(fn));
    auto path = out_dir / (name + ".pbin." + p);
    write_bytes(path, image);
    fmt::print("{}: {} bytes\n", path.string(), image.size());
  }
  return 0;
}

int disasm(const fs::path& file) {
  auto archive = pcode::parse_archive(read_bytes(file));
  fmt::print("; version {} deps [", archive.format_version);
  for (std::size_t i = 0; i < archive.deps.size(); ++i)
    fmt::print("{}{}", i ? ", " : "", archive.deps[i]);
  fmt::print("]\n");
  for (const auto& v : archive.variants) {
    fmt::print("; variant {} ({} code bytes)\n", v.profile_name, v.blob.code.size());
    fmt::print("{}", pcode::disassemble(v.blob));
  }
  return 0;
}

int verify_file(const fs::path& file) {
  auto archive = pcode::parse_archive(read_bytes(file));
  int rc = 0;
  for (const auto& v : archive.variants) {
    auto r = pcode::verify(v.blob);
    if (r.ok()) {
      fmt::print("{}: ok, max stack {}\n", v.profile_name, r.max_stack);
    } else {
      fmt::print("{}: {}\n", v.profile_name, r.summary());
      rc = 1;
    }
  }
  return rc;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"bitchain ifunc assembler"};
  app.require_subcommand(1);

  fs::path src, out_dir = ".", file;
  std::string name, variants = "le64-generic,le64-fused,be64-generic", prelink = "le64-generic,le64-fused,be64-generic";
  auto* b = app.add_subcommand("build", "assemble a listing into <name>.pbca and prelinked images");
  b->add_option("source", src, "listing (.pasm)")->required()->check(CLI::ExistingFile);
  b->add_option("-o,--out-dir", out_dir, "output directory");
  b->add_option("--name", name, "ifunc name (default: file stem)");
  b->add_option("--variants", variants, "comma-separated variant profile names");
  b->add_option("--prelink", prelink, "comma-separated profiles to prelink (empty for none)");

  auto* d = app.add_subcommand("disasm", "print every variant of an archive");
  d->add_option("archive", file)->required()->check(CLI::ExistingFile);
  auto* v = app.add_subcommand("verify", "verify every variant of an archive");
  v->add_option("archive", file)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*b)
      return build(src, out_dir, name, variants, prelink);
    if (*d)
      return disasm(file);
    return verify_file(file);
  } catch (const std::exception& e) {
    fmt::print(stderr, "bitchain-asm: {}\n", e.what());
    return 1;
  }
}
