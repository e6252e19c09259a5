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

#include "bitchain/net/sim.hpp"
#include "bitchain/net/tcp.hpp"
#include "bitchain/node/node.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace bitchain::bench {

/// The set of nodes a benchmark can drive. A simulated fabric hosts every
/// node in-process on virtual time; a TCP fabric hosts only the local node.
class Fabric {
public:
  virtual ~Fabric() = default;

  virtual std::size_t size() const = 0;
  virtual bool is_local(net::NodeId id) const = 0;
  virtual node::Node& node(net::NodeId id) = 0;
  virtual bool simulated() const = 0;

  /// Moves the network until done() holds. Throws Errc::timeout when nothing
  /// can make progress any more.
  virtual void drive(const std::function<bool()>& done, const char* what) = 0;

  /// PUT and GET payload bytes sent by local nodes.
  std::uint64_t wire_bytes();
};

class SimFabric final : public Fabric {
public:
  SimFabric(std::size_t nodes, net::NetConfig net, const std::vector<node::NodeConfig>& configs);

  std::size_t size() const override { return nodes_.size(); }
  bool is_local(net::NodeId id) const override { return id < nodes_.size(); }
  node::Node& node(net::NodeId id) override { return *nodes_.at(id); }
  bool simulated() const override { return true; }
  void drive(const std::function<bool()>& done, const char* what) override;

  net::SimCluster& cluster() noexcept { return cluster_; }

private:
  net::SimCluster cluster_;
  std::vector<std::unique_ptr<node::Node>> nodes_;
};

class TcpFabric final : public Fabric {
public:
  TcpFabric(net::NodeId self, net::PeerList peers, net::NetConfig net, node::NodeConfig config);

  std::size_t size() const override { return transport_.node_count(); }
  bool is_local(net::NodeId id) const override { return id == transport_.self(); }
  node::Node& node(net::NodeId id) override;
  bool simulated() const override { return false; }
  void drive(const std::function<bool()>& done, const char* what) override;

  net::TcpTransport& transport() noexcept { return transport_; }

private:
  net::TcpTransport transport_;
  node::Node node_;
  std::uint32_t timeout_ms_;
};

} // namespace bitchain::bench
