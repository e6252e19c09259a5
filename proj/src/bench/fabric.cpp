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

#include "bitchain/bench/fabric.hpp"

#include <chrono>

namespace bitchain::bench {

std::uint64_t Fabric::wire_bytes() {
  std::uint64_t total = 0;
  for (net::NodeId id = 0; id < size(); ++id)
    if (is_local(id)) {
      const auto& c = node(id).transport().counters();
      total += c.put_bytes + c.get_bytes;
    }
  return total;
}

SimFabric::SimFabric(std::size_t nodes, net::NetConfig net, const std::vector<node::NodeConfig>& configs)
    : cluster_(nodes, net) {
  for (std::size_t i = 0; i < nodes; ++i)
    nodes_.push_back(std::make_unique<node::Node>(cluster_.transport(static_cast<net::NodeId>(i)),
                                                  i < configs.size() ? configs[i] : node::NodeConfig{}));
}

void SimFabric::drive(const std::function<bool()>& done, const char* what) {
  while (!done()) {
    if (cluster_.idle())
      throw Error(Errc::timeout, std::string(what) + ": simulation stalled at " + std::to_string(cluster_.now()) +
                                     " ns with nothing in flight");
    if (auto id = cluster_.step())
      nodes_[*id]->poll();
  }
}

TcpFabric::TcpFabric(net::NodeId self, net::PeerList peers, net::NetConfig net, node::NodeConfig config)
    : transport_(self, std::move(peers), net), node_(transport_, std::move(config)),
      timeout_ms_(net.io_timeout_ms) {}

node::Node& TcpFabric::node(net::NodeId id) {
  if (id != transport_.self())
    throw Error(Errc::unknown_endpoint, "node " + std::to_string(id) + " is not local");
  return node_;
}

void TcpFabric::drive(const std::function<bool()>& done, const char* what) {
  using Clock = std::chrono::steady_clock;
  auto last_activity = Clock::now();
  while (!done()) {
    if (node_.poll() > 0) {
      last_activity = Clock::now();
      continue;
    }
    if (Clock::now() - last_activity > std::chrono::milliseconds(timeout_ms_))
      throw Error(Errc::timeout, std::string(what) + ": no progress for " + std::to_string(timeout_ms_) + " ms");
    transport_.wait_activity(1000);
  }
}

} // namespace bitchain::bench
