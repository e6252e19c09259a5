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

#include "bitchain/pcode/compiler.hpp"

#include "bitchain/pcode/verifier.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstring>

namespace bitchain::pcode {

CapabilityRegistry CapabilityRegistry::all() {
  CapabilityRegistry r;
  r.present_.fill(true);
  return r;
}

CapabilityRegistry& CapabilityRegistry::add(std::string_view name) {
  const auto* sig = find_capability(name);
  if (!sig)
    throw Error(Errc::invalid_argument, "no such capability '" + std::string(name) + "'");
  present_[static_cast<std::size_t>(sig->capability)] = true;
  return *this;
}

CapabilityRegistry& CapabilityRegistry::remove(std::string_view name) {
  if (const auto* sig = find_capability(name))
    present_[static_cast<std::size_t>(sig->capability)] = false;
  return *this;
}

const CapabilitySignature* CapabilityRegistry::resolve(std::string_view name) const noexcept {
  const auto* sig = find_capability(name);
  return sig && present_[static_cast<std::size_t>(sig->capability)] ? sig : nullptr;
}

namespace {

constexpr std::size_t kInstrWireSize = sizeof(Instr);
constexpr std::uint8_t kImageMagic[4] = {'P', 'B', 'I', 'N'};

std::vector<Capability> bind(const std::vector<std::string>& imports, const CapabilityRegistry& caps) {
  std::vector<Capability> bound;
  bound.reserve(imports.size());
  for (const auto& name : imports) {
    if (const auto* sig = caps.resolve(name))
      bound.push_back(sig->capability);
  }
  if (bound.size() == imports.size())
    return bound;
  std::string missing;
  for (const auto& name : imports)
    if (!caps.resolve(name))
      missing += (missing.empty() ? "" : ", ") + name;
  throw Error(Errc::unresolved_capability, missing);
}

struct SourceInstr {
  Op op;
  std::uint32_t pc;
  std::uint32_t next;
  std::uint64_t operand;
  std::uint32_t target = 0;
};

SourceInstr decode_at(const ByteVec& code, std::uint32_t pc) {
  const OpInfo& info = kOpTable[code[pc]];
  SourceInstr s{static_cast<Op>(code[pc]), pc, pc + 1u + info.operand_size, 0};
  const std::uint8_t* arg = code.data() + pc + 1;
  switch (info.operand_size) {
  case 1: s.operand = arg[0]; break;
  case 2: s.operand = load_le<std::uint16_t>(arg); break;
  case 4: s.operand = load_le<std::uint32_t>(arg); break;
  case 8: s.operand = load_le<std::uint64_t>(arg); break;
  default: break;
  }
  if (is_jump(s.op))
    s.target = static_cast<std::uint32_t>(static_cast<std::int64_t>(s.next) + static_cast<std::int32_t>(s.operand));
  return s;
}

Instr make_instr(std::uint8_t op, std::uint8_t fuel, std::uint32_t pc, std::uint32_t aux_pc, std::uint64_t operand) {
  Instr i;
  i.op = op;
  i.fuel = fuel;
  i.pc = pc;
  i.aux_pc = aux_pc;
  i.operand = operand;
  return i;
}

// Decodes the reachable part of a verified blob in source order.
Dispatch lower(const CodeBlob& blob, bool fuse) {
  const ByteVec& code = blob.code;
  std::vector<std::uint8_t> seen(code.size(), 0);
  std::vector<std::uint8_t> is_target(code.size(), 0);
  std::vector<std::uint32_t> work{0};
  std::vector<SourceInstr> reachable;
  while (!work.empty()) {
    std::uint32_t pc = work.back();
    work.pop_back();
    if (seen[pc])
      continue;
    seen[pc] = 1;
    SourceInstr s = decode_at(code, pc);
    reachable.push_back(s);
    if (s.op == Op::Halt)
      continue;
    if (is_jump(s.op)) {
      is_target[s.target] = 1;
      work.push_back(s.target);
      if (s.op == Op::Jmp)
        continue;
    }
    work.push_back(s.next);
  }
  std::sort(reachable.begin(), reachable.end(), [](const auto& a, const auto& b) { return a.pc < b.pc; });

  Dispatch out;
  out.reserve(reachable.size());
  std::vector<std::uint32_t> index_of(code.size(), 0);
  for (std::size_t i = 0; i < reachable.size(); ++i) {
    const SourceInstr& s = reachable[i];
    index_of[s.pc] = static_cast<std::uint32_t>(out.size());
    if (fuse && s.op == Op::Push && i + 1 < reachable.size()) {
      const SourceInstr& n = reachable[i + 1];
      if (n.pc == s.next && is_binary_arith(n.op) && !is_target[n.pc]) {
        auto fused = static_cast<std::uint8_t>(kFusedBase + (static_cast<std::uint8_t>(n.op) -
                                                             static_cast<std::uint8_t>(Op::Add)));
        out.push_back(make_instr(fused, 2, s.pc, n.pc, s.operand));
        ++i;
        continue;
      }
    }
    out.push_back(make_instr(static_cast<std::uint8_t>(s.op), 1, s.pc, s.pc, s.operand));
  }
  for (auto& ins : out) {
    if (ins.op == static_cast<std::uint8_t>(Op::Jmp) || ins.op == static_cast<std::uint8_t>(Op::Jz)) {
      auto target = static_cast<std::uint32_t>(static_cast<std::int64_t>(ins.pc) + 5 +
                                               static_cast<std::int32_t>(ins.operand));
      ins.operand = index_of[target];
    }
  }
  return out;
}

template <typename T>
void put(ByteVec& out, T v, Family f) {
  std::uint8_t tmp[sizeof(T)];
  if (f == Family::Le64)
    store_le(tmp, v);
  else
    store_be(tmp, v);
  out.insert(out.end(), tmp, tmp + sizeof(T));
}

template <typename T>
T get(const std::uint8_t* p, Family f) {
  return f == Family::Le64 ? load_le<T>(p) : load_be<T>(p);
}

enum class OpClass : std::uint8_t { invalid, plain, fused, jump, local, hostcall };

constexpr std::array<OpClass, 256> make_op_classes() {
  std::array<OpClass, 256> t{};
  for (unsigned i = 0; i < kOpCount; ++i) {
    auto op = static_cast<Op>(i);
    t[i] = is_jump(op) ? OpClass::jump
           : (op == Op::LdLoc || op == Op::StLoc) ? OpClass::local
           : op == Op::HostCall ? OpClass::hostcall
                                : OpClass::plain;
  }
  for (unsigned i = kFusedBase; i < kFusedEnd; ++i)
    t[i] = OpClass::fused;
  return t;
}

constexpr std::array<OpClass, 256> kOpClasses = make_op_classes();

struct Limits {
  std::size_t count;
  std::uint64_t locals;
  std::uint64_t imports;
  bool fused;
};

// Copies serialized dispatch into out and range-checks it. Returns the
// index of the first bad instruction, or out.size() when all are valid.
std::size_t decode_dispatch(ByteSpan raw, Family family, Dispatch& out, const Limits& lim) {
  out.resize(raw.size() / kInstrWireSize);
  std::memcpy(out.data(), raw.data(), raw.size());
  if ((family == Family::Le64) != (std::endian::native == std::endian::little)) {
    for (Instr& ins : out) {
      ins.pc = detail::bswap(ins.pc);
      ins.aux_pc = detail::bswap(ins.aux_pc);
      ins.operand = detail::bswap(ins.operand);
    }
  }
  // Per-class expected fuel and largest operand; fuel 0x100 never matches.
  constexpr std::uint16_t kNever = 0x100;
  const std::uint16_t fuel[6] = {kNever, 1, lim.fused ? std::uint16_t{2} : kNever,
                                 lim.count ? std::uint16_t{1} : kNever, lim.locals ? std::uint16_t{1} : kNever,
                                 lim.imports ? std::uint16_t{1} : kNever};
  const std::uint64_t top[6] = {0, ~0ULL, ~0ULL, lim.count - 1, lim.locals - 1, lim.imports - 1};
  std::uint64_t bad = 0;
  for (const Instr& ins : out) {
    const auto c = static_cast<unsigned>(kOpClasses[ins.op]);
    bad |= static_cast<std::uint64_t>(ins.fuel != fuel[c]) | static_cast<std::uint64_t>(ins.operand > top[c]) |
           ins.reserved0 | ins.reserved1;
  }
  if (!bad)
    return out.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Instr& ins = out[i];
    const auto c = static_cast<unsigned>(kOpClasses[ins.op]);
    if (ins.fuel != fuel[c] || ins.operand > top[c] || ins.reserved0 || ins.reserved1)
      return i;
  }
  return out.size();
}

} // namespace

CompiledFunction compile(const CodeBlob& blob, const TargetProfile& profile, const CapabilityRegistry& capabilities,
                         std::uint64_t type_id) {
  auto t0 = std::chrono::steady_clock::now();
  VerifyResult vr = verify(blob);
  if (!vr.ok())
    throw Error(Errc::verify_failed, vr.summary());
  CompiledFunction fn;
  fn.bound_capabilities = bind(blob.imports, capabilities);
  fn.type_id = type_id;
  fn.profile = profile;
  fn.locals_count = blob.locals_count;
  fn.max_stack = vr.max_stack;
  fn.imports = blob.imports;
  fn.dispatch = std::make_shared<const Dispatch>(lower(blob, profile.fused_dispatch));
  auto t1 = std::chrono::steady_clock::now();
  fn.compile_cost_ns = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  return fn;
}

PrelinkedImage prelink(const CompiledFunction& fn) {
  if (!fn.dispatch)
    throw Error(Errc::invalid_argument, "function has no dispatch");
  PrelinkedImage img;
  img.profile_name = fn.profile.name;
  img.locals_count = fn.locals_count;
  img.max_stack = fn.max_stack;
  img.imports = fn.imports;
  img.serialized_dispatch.reserve(fn.dispatch->size() * kInstrWireSize);
  for (const auto& ins : *fn.dispatch) {
    img.serialized_dispatch.push_back(ins.op);
    img.serialized_dispatch.push_back(ins.fuel);
    put(img.serialized_dispatch, ins.reserved0, fn.profile.family);
    put(img.serialized_dispatch, ins.pc, fn.profile.family);
    put(img.serialized_dispatch, ins.aux_pc, fn.profile.family);
    put(img.serialized_dispatch, ins.reserved1, fn.profile.family);
    put(img.serialized_dispatch, ins.operand, fn.profile.family);
  }
  return img;
}

CompiledFunction load_prelinked(const PrelinkedImage& image, const TargetProfile& profile,
                                const CapabilityRegistry& capabilities, std::uint64_t type_id) {
  if (image.profile_name != profile.name)
    throw Error(Errc::profile_mismatch,
                "image built for '" + image.profile_name + "', node profile is '" + profile.name + "'");
  const ByteVec& raw = image.serialized_dispatch;
  if (raw.empty() || raw.size() % kInstrWireSize != 0)
    throw Error(Errc::malformed, "dispatch length " + std::to_string(raw.size()));
  const std::size_t n = raw.size() / kInstrWireSize;
  auto dispatch = std::make_shared<Dispatch>();
  const Limits lim{n, image.locals_count, image.imports.size(), profile.fused_dispatch};
  std::size_t bad = decode_dispatch(raw, profile.family, *dispatch, lim);
  if (bad != n)
    throw Error(Errc::malformed, "bad instruction " + std::to_string(bad));
  CompiledFunction fn;
  fn.bound_capabilities = bind(image.imports, capabilities);
  fn.type_id = type_id;
  fn.profile = profile;
  fn.locals_count = image.locals_count;
  fn.max_stack = image.max_stack;
  fn.imports = image.imports;
  fn.dispatch = std::move(dispatch);
  return fn;
}

ByteVec encode_prelinked(const PrelinkedImage& image) {
  TargetProfile p = TargetProfile::named(image.profile_name);
  ByteWriter w;
  w.bytes(kImageMagic);
  w.u8(static_cast<std::uint8_t>(p.family));
  w.short_string(image.profile_name);
  w.u16(image.locals_count);
  w.u16(image.max_stack);
  if (image.imports.size() > kMaxImports)
    throw Error(Errc::too_many_imports, std::to_string(image.imports.size()));
  w.u8(static_cast<std::uint8_t>(image.imports.size()));
  for (const auto& name : image.imports)
    w.short_string(name);
  w.u32(static_cast<std::uint32_t>(image.serialized_dispatch.size()));
  w.bytes(image.serialized_dispatch);
  return std::move(w).take();
}

PrelinkedImage decode_prelinked(ByteSpan bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 4 || !std::equal(kImageMagic, kImageMagic + 4, bytes.begin()))
    throw Error(Errc::bad_magic, "prelinked image does not start with PBIN");
  r.bytes(4);
  r.u8(); // family, implied by the profile name
  PrelinkedImage img;
  img.profile_name = r.short_string();
  if (!valid_profile_name(img.profile_name))
    throw Error(Errc::invalid_profile, "bad image profile name");
  img.locals_count = r.u16();
  img.max_stack = r.u16();
  std::size_t n_imports = r.u8();
  for (std::size_t i = 0; i < n_imports; ++i)
    img.imports.push_back(r.short_string());
  std::uint32_t len = r.u32();
  if (len > r.remaining())
    throw Error(Errc::length_overflow, "dispatch length exceeds image");
  ByteSpan d = r.bytes(len);
  img.serialized_dispatch.assign(d.begin(), d.end());
  if (!r.done())
    throw Error(Errc::malformed, "trailing bytes after prelinked image");
  return img;
}

} // namespace bitchain::pcode
