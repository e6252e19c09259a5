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

#include "bitchain/bench/table.hpp"

#include "bitchain/error.hpp"

#include <numeric>
#include <random>
#include <string>

namespace bitchain::bench {

PointerTable gen_table(std::uint64_t num_servers, std::uint64_t shard_size, std::uint64_t seed) {
  if (num_servers == 0 || shard_size == 0)
    throw Error(Errc::invalid_argument, "table needs at least one server and one entry per shard");
  if (num_servers > (std::uint64_t{1} << 32) / shard_size)
    throw Error(Errc::invalid_argument, "table too large");
  PointerTable t;
  t.num_servers = num_servers;
  t.shard_size = shard_size;
  t.seed = seed;
  const std::uint64_t n = num_servers * shard_size;
  std::vector<std::uint64_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  // Sattolo: swapping only with strictly earlier positions yields one cycle.
  for (std::uint64_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::uint64_t> pick(0, i - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  t.entries = std::move(perm);
  return t;
}

bool is_single_cycle(const std::vector<std::uint64_t>& entries) {
  const std::uint64_t n = entries.size();
  if (n == 0)
    return false;
  std::vector<bool> seen(n, false);
  std::uint64_t at = 0;
  for (std::uint64_t steps = 0; steps < n; ++steps) {
    if (at >= n || seen[at])
      return false;
    seen[at] = true;
    at = entries[at];
  }
  return at == 0;
}

ChaseTrace oracle_chase(const PointerTable& table, std::uint64_t start, std::uint64_t depth) {
  if (start >= table.size())
    throw Error(Errc::invalid_argument, "start " + std::to_string(start) + " outside table");
  ChaseTrace t;
  t.reads.reserve(depth);
  t.owners.reserve(depth);
  std::uint64_t at = start;
  for (std::uint64_t i = 0; i < depth; ++i) {
    t.reads.push_back(at);
    t.owners.push_back(table.owner(at));
    if (i > 0 && t.owners[i] != t.owners[i - 1])
      ++t.transitions;
    at = table.entries[at];
  }
  t.value = at;
  return t;
}

} // namespace bitchain::bench
