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

#include "bitchain/net/transport.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bitchain::net {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw Error(Errc::invalid_argument, "config key '" + std::string(key) + "' needs an unsigned integer");
  return out;
}

} // namespace

NetConfig NetConfig::parse(std::string_view text) {
  NetConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto c = line.find('#'); c != std::string_view::npos)
      line = line.substr(0, c);
    line = trim(line);
    if (line.empty())
      continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::syntax, "config line " + std::to_string(line_no) + ": expected key=value");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view val = trim(line.substr(eq + 1));
    if (key == "slots")
      cfg.channel.slots = static_cast<std::uint32_t>(to_u64(key, val));
    else if (key == "slot_size")
      cfg.channel.slot_size = static_cast<std::uint32_t>(to_u64(key, val));
    else if (key == "credit_policy") {
      if (val == "error")
        cfg.channel.credit_policy = CreditPolicy::error;
      else if (val == "block")
        cfg.channel.credit_policy = CreditPolicy::block;
      else
        throw Error(Errc::invalid_argument, "credit_policy must be error or block");
    } else if (key == "latency_ns")
      cfg.cost.latency_ns = to_u64(key, val);
    else if (key == "bandwidth_gbps") {
      double gbps = 0;
      auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), gbps);
      if (ec != std::errc() || p != val.data() + val.size() || !(gbps > 0))
        throw Error(Errc::invalid_argument, "bandwidth_gbps must be positive");
      cfg.cost.bandwidth_mbps = static_cast<std::uint64_t>(std::llround(gbps * 1000.0));
    } else if (key == "jitter_ns")
      cfg.cost.jitter_ns = to_u64(key, val);
    else if (key == "seed")
      cfg.seed = to_u64(key, val);
    else if (key == "connect_timeout_ms")
      cfg.connect_timeout_ms = static_cast<std::uint32_t>(to_u64(key, val));
    else if (key == "io_timeout_ms")
      cfg.io_timeout_ms = static_cast<std::uint32_t>(to_u64(key, val));
    else
      throw Error(Errc::invalid_argument, "unknown config key '" + std::string(key) + "'");
  }
  if (cfg.channel.slots == 0 || cfg.channel.slot_size < 64)
    throw Error(Errc::invalid_argument, "need at least one slot of at least 64 bytes");
  return cfg;
}

NetConfig NetConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f)
    throw Error(Errc::not_found, path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

} // namespace bitchain::net
