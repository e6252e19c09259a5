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

#include <cstdint>
#include <vector>

namespace bitchain::bench {

/// A single-cycle permutation of [0, num_servers * shard_size), split into
/// equal shards indexed server-first. entries[i] is the next global index.
struct PointerTable {
  std::uint64_t num_servers = 0;
  std::uint64_t shard_size = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> entries;

  std::uint64_t size() const noexcept { return entries.size(); }
  std::uint64_t owner(std::uint64_t index) const noexcept { return index / shard_size; }
};

/// Sattolo shuffle seeded with mt19937_64. Throws Errc::invalid_argument on
/// zero servers or shard size.
PointerTable gen_table(std::uint64_t num_servers, std::uint64_t shard_size, std::uint64_t seed);

bool is_single_cycle(const std::vector<std::uint64_t>& entries);

struct ChaseTrace {
  std::uint64_t value = 0;
  std::vector<std::uint64_t> reads;  // indices read, in order
  std::vector<std::uint64_t> owners; // owner of each read
  std::uint64_t transitions = 0;     // consecutive reads on different servers
};

/// Sequential walk: depth reads starting at start; value is the last read.
ChaseTrace oracle_chase(const PointerTable& table, std::uint64_t start, std::uint64_t depth);

/// Forwards an injected chase makes when it first lands on entry_server.
inline std::uint64_t expected_forwards(const ChaseTrace& t, std::uint64_t entry_server) noexcept {
  return t.transitions + (!t.owners.empty() && t.owners.front() != entry_server ? 1 : 0);
}

} // namespace bitchain::bench
