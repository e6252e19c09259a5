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

#include "bitchain/pcode/assembler.hpp"

#include "bitchain/pcode/isa.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace bitchain::pcode {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == ','))
      ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != ',')
      ++i;
    if (i > start)
      out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool is_label_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_' || s[0] == '.'))
    return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

std::optional<std::uint64_t> parse_unsigned(std::string_view s) {
  std::uint64_t v = 0;
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  if (s.empty())
    return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}

struct Line {
  int number;
  std::vector<std::string_view> tokens; // instruction or directive, labels stripped
};

class Assembler {
public:
  explicit Assembler(std::string_view src) : src_(src) {}

  CodeBlob run() {
    scan();
    emit();
    return std::move(blob_);
  }

private:
  [[noreturn]] void syntax(int line, const std::string& msg) const {
    throw Error(Errc::syntax, "line " + std::to_string(line) + ": " + msg);
  }

  void scan() {
    std::size_t pos = 0;
    int number = 0;
    std::uint32_t offset = 0;
    while (pos <= src_.size()) {
      std::size_t eol = src_.find('\n', pos);
      if (eol == std::string_view::npos)
        eol = src_.size();
      std::string_view raw = src_.substr(pos, eol - pos);
      pos = eol + 1;
      ++number;
      if (auto c = raw.find_first_of(";#"); c != std::string_view::npos)
        raw = raw.substr(0, c);
      auto tokens = split_tokens(raw);
      while (!tokens.empty() && tokens.front().size() > 1 && tokens.front().back() == ':') {
        std::string_view name = tokens.front().substr(0, tokens.front().size() - 1);
        if (!is_label_name(name))
          syntax(number, "bad label '" + std::string(name) + "'");
        if (!labels_.emplace(std::string(name), offset).second)
          syntax(number, "duplicate label '" + std::string(name) + "'");
        tokens.erase(tokens.begin());
      }
      if (tokens.empty())
        continue;
      offset += size_of(number, tokens);
      lines_.push_back({number, std::move(tokens)});
    }
  }

  std::uint32_t size_of(int line, const std::vector<std::string_view>& t) {
    std::string head = upper(t[0]);
    if (head == ".LOCALS" || head == ".IMPORT") {
      if (head == ".IMPORT") {
        if (t.size() != 2)
          syntax(line, ".import takes one name");
        if (std::find(imports_.begin(), imports_.end(), t[1]) == imports_.end())
          imports_.emplace_back(t[1]);
        if (imports_.size() > kMaxImports)
          throw Error(Errc::too_many_imports, "line " + std::to_string(line) + ": more than 255 imports");
      }
      return 0;
    }
    if (head == ".BYTE")
      return static_cast<std::uint32_t>(t.size() - 1);
    if (head == ".FILL") {
      if (t.size() != 3)
        syntax(line, ".fill takes a count and a mnemonic");
      auto count = parse_unsigned(t[1]);
      const OpInfo* info = find_op(t[2]);
      if (!count || !info || info->operand_size != 0)
        syntax(line, ".fill needs a count and an operand-less mnemonic");
      return static_cast<std::uint32_t>(*count);
    }
    const OpInfo* info = find_op(t[0]);
    if (!info)
      syntax(line, "unknown mnemonic '" + std::string(t[0]) + "'");
    std::size_t want = info->operand_size ? 2 : 1;
    if (t.size() != want)
      syntax(line, std::string(info->mnemonic) + " takes " + std::to_string(want - 1) + " operand(s)");
    return 1u + info->operand_size;
  }

  static const OpInfo* find_op(std::string_view mnemonic) {
    std::string m = upper(mnemonic);
    for (const auto& info : kOpTable)
      if (info.mnemonic == m)
        return &info;
    return nullptr;
  }

  static std::uint8_t opcode_of(const OpInfo* info) {
    return static_cast<std::uint8_t>(info - kOpTable.data());
  }

  void emit() {
    blob_.imports = imports_;
    ByteVec& code = blob_.code;
    for (const auto& line : lines_) {
      const auto& t = line.tokens;
      std::string head = upper(t[0]);
      if (head == ".LOCALS") {
        auto n = t.size() == 2 ? parse_unsigned(t[1]) : std::nullopt;
        if (!n || *n > UINT16_MAX)
          syntax(line.number, ".locals takes a count in 0..65535");
        blob_.locals_count = static_cast<std::uint16_t>(*n);
        continue;
      }
      if (head == ".IMPORT")
        continue;
      if (head == ".BYTE") {
        for (std::size_t i = 1; i < t.size(); ++i) {
          auto b = parse_unsigned(t[i]);
          if (!b || *b > 0xFF)
            syntax(line.number, "bad byte '" + std::string(t[i]) + "'");
          code.push_back(static_cast<std::uint8_t>(*b));
        }
        continue;
      }
      if (head == ".FILL") {
        code.insert(code.end(), *parse_unsigned(t[1]), opcode_of(find_op(t[2])));
        continue;
      }
      const OpInfo* info = find_op(t[0]);
      auto op = static_cast<Op>(opcode_of(info));
      code.push_back(static_cast<std::uint8_t>(op));
      std::uint8_t buf[8];
      switch (op) {
      case Op::Push:
        store_le<std::uint64_t>(buf, immediate(line.number, t[1]));
        code.insert(code.end(), buf, buf + 8);
        break;
      case Op::Jmp:
      case Op::Jz: {
        auto next = static_cast<std::int64_t>(code.size() + 4);
        std::int64_t rel = jump_operand(line.number, t[1], next);
        if (rel < INT32_MIN || rel > INT32_MAX)
          syntax(line.number, "jump distance out of range");
        store_le<std::uint32_t>(buf, static_cast<std::uint32_t>(static_cast<std::int32_t>(rel)));
        code.insert(code.end(), buf, buf + 4);
        break;
      }
      case Op::LdLoc:
      case Op::StLoc: {
        auto idx = parse_unsigned(t[1]);
        if (!idx || *idx > UINT16_MAX)
          syntax(line.number, "bad local index '" + std::string(t[1]) + "'");
        store_le<std::uint16_t>(buf, static_cast<std::uint16_t>(*idx));
        code.insert(code.end(), buf, buf + 2);
        break;
      }
      case Op::HostCall: code.push_back(hostcall_slot(line.number, t[1])); break;
      default: break;
      }
    }
  }

  std::uint64_t immediate(int line, std::string_view tok) const {
    if (tok.starts_with("typeid(") && tok.ends_with(")"))
      return fnv1a64(tok.substr(7, tok.size() - 8));
    if (!tok.empty() && tok[0] == '-') {
      auto mag = parse_unsigned(tok.substr(1));
      if (!mag)
        syntax(line, "bad immediate '" + std::string(tok) + "'");
      return ~*mag + 1;
    }
    auto v = parse_unsigned(tok);
    if (!v)
      syntax(line, "bad immediate '" + std::string(tok) + "'");
    return *v;
  }

  std::int64_t jump_operand(int line, std::string_view tok, std::int64_t next) const {
    if (!tok.empty() && (tok[0] == '+' || tok[0] == '-')) {
      auto mag = parse_unsigned(tok.substr(1));
      if (!mag)
        syntax(line, "bad relative jump '" + std::string(tok) + "'");
      auto m = static_cast<std::int64_t>(*mag);
      return tok[0] == '-' ? -m : m;
    }
    auto it = labels_.find(std::string(tok));
    if (it == labels_.end())
      throw Error(Errc::undefined_label, "line " + std::to_string(line) + ": '" + std::string(tok) + "'");
    return static_cast<std::int64_t>(it->second) - next;
  }

  std::uint8_t hostcall_slot(int line, std::string_view tok) const {
    if (auto idx = parse_unsigned(tok)) {
      if (*idx > 0xFF)
        syntax(line, "hostcall slot out of range");
      return static_cast<std::uint8_t>(*idx);
    }
    auto it = std::find(imports_.begin(), imports_.end(), tok);
    if (it == imports_.end())
      syntax(line, "hostcall names '" + std::string(tok) + "' which is not imported");
    return static_cast<std::uint8_t>(it - imports_.begin());
  }

  std::string_view src_;
  std::vector<Line> lines_;
  std::map<std::string, std::uint32_t> labels_;
  std::vector<std::string> imports_;
  CodeBlob blob_;
};

} // namespace

CodeBlob assemble(std::string_view source) { return Assembler(source).run(); }

std::string disassemble(const CodeBlob& blob) {
  std::ostringstream out;
  out << ".locals " << blob.locals_count << "\n";
  for (const auto& name : blob.imports)
    out << ".import " << name << "\n";

  const ByteVec& code = blob.code;
  std::set<std::size_t> boundaries;
  std::set<std::size_t> targets;
  std::size_t decodable_end = 0;
  for (std::size_t pc = 0; pc < code.size();) {
    const OpInfo* info = op_info(code[pc]);
    if (!info || pc + 1 + info->operand_size > code.size())
      break;
    boundaries.insert(pc);
    std::size_t next = pc + 1 + info->operand_size;
    if (is_jump(static_cast<Op>(code[pc]))) {
      auto rel = static_cast<std::int32_t>(load_le<std::uint32_t>(code.data() + pc + 1));
      std::int64_t target = static_cast<std::int64_t>(next) + rel;
      if (target >= 0)
        targets.insert(static_cast<std::size_t>(target));
    }
    pc = next;
    decodable_end = next;
  }

  for (std::size_t pc = 0; pc < decodable_end;) {
    if (targets.count(pc))
      out << "L" << pc << ":\n";
    auto op = static_cast<Op>(code[pc]);
    const OpInfo& info = kOpTable[code[pc]];
    const std::uint8_t* arg = code.data() + pc + 1;
    std::size_t next = pc + 1 + info.operand_size;
    out << "    " << info.mnemonic;
    switch (op) {
    case Op::Push: out << " " << load_le<std::uint64_t>(arg); break;
    case Op::Jmp:
    case Op::Jz: {
      auto rel = static_cast<std::int32_t>(load_le<std::uint32_t>(arg));
      std::int64_t target = static_cast<std::int64_t>(next) + rel;
      if (target >= 0 && boundaries.count(static_cast<std::size_t>(target)))
        out << " L" << target;
      else
        out << " " << (rel < 0 ? "-" : "+") << (rel < 0 ? -static_cast<std::int64_t>(rel) : rel);
      break;
    }
    case Op::LdLoc:
    case Op::StLoc: out << " " << load_le<std::uint16_t>(arg); break;
    case Op::HostCall:
      if (arg[0] < blob.imports.size())
        out << " " << blob.imports[arg[0]];
      else
        out << " " << static_cast<unsigned>(arg[0]);
      break;
    default: break;
    }
    out << "\n";
    pc = next;
  }
  // Undecodable tail bytes are emitted raw.
  for (std::size_t pc = decodable_end; pc < code.size(); ++pc)
    out << "    .byte " << static_cast<unsigned>(code[pc]) << "\n";
  return out.str();
}

} // namespace bitchain::pcode
