/*
 * Copyright (C) 2026 Fleet Middleware Contributors
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
 *
*/
#pragma once

#include <fleet/topology/cloud.hpp>
#include <fleet/topology/multi_master.hpp>
#include <fleet/topology/single_master.hpp>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fleet::topology {

enum class Topology { Single, Multi, Cloud };

/// "SMS", "MMS" or "CRS".
std::string_view to_string(Topology topology);

/// Accepts single/multi/cloud and sms/mms/crs in any case. Throws
/// InvalidArgument.
Topology parse_topology(std::string_view text);

/// Uniform pub/sub surface over one running topology. Nodes live either on
/// the server host or on a robot host; the fabric does whatever wiring the
/// topology needs so that advertised topics reach subscribers elsewhere.
class Fabric
{
public:
  using Callback = Bus::Callback;

  Fabric(Network& network, std::string server_host);
  virtual ~Fabric() = default;

  Fabric(const Fabric&) = delete;
  Fabric& operator=(const Fabric&) = delete;

  virtual Topology topology() const = 0;
  Network& network() { return _network; }
  const std::string& server_host() const { return _server_host; }

  virtual void add_node(const NodeId& node, const std::string& host) = 0;
  virtual TopicHandle advertise(
    const NodeId& node, const std::string& topic, const std::string& msg_type) = 0;
  virtual SubscriptionHandle subscribe(
    const NodeId& node, const std::string& topic, const std::string& msg_type,
    Callback callback) = 0;

  void publish(const TopicHandle& handle, std::shared_ptr<const Bytes> payload);
  void publish(const TopicHandle& handle, Bytes payload);

  /// Starts background machinery such as discovery.
  virtual void start() {}

  /// Virtual time to run after start() before data can flow.
  virtual messaging::TimeNs warmup() const { return 0; }

  /// Spawns a node on the server that republishes `in` on `out`.
  virtual void spawn_echo(
    const std::string& name, const std::string& in, const std::string& out,
    const std::string& msg_type);

  bool has_node(const NodeId& node) const { return _buses.contains(node); }
  const std::string& host_of(const NodeId& node) const;

protected:
  Bus& bus_of(const NodeId& node);
  void bind(const NodeId& node, Bus& bus, const std::string& host);

  Network& _network;
  std::string _server_host;

private:
  std::map<NodeId, Bus*> _buses;
  std::map<NodeId, std::string> _hosts;
};

class SingleMasterFabric : public Fabric
{
public:
  SingleMasterFabric(Network& network, std::string server_host);

  Topology topology() const override { return Topology::Single; }
  SingleMasterSystem& system() { return _system; }

  void add_node(const NodeId& node, const std::string& host) override;
  TopicHandle advertise(const NodeId& node, const std::string& topic,
    const std::string& msg_type) override;
  SubscriptionHandle subscribe(const NodeId& node, const std::string& topic,
    const std::string& msg_type, Callback callback) override;

private:
  SingleMasterSystem _system;
};

/// One domain per host. A subscription adds its topic to the subscriber's
/// domain allowlist so that the domain's sync node pulls it.
class MultiMasterFabric : public Fabric
{
public:
  MultiMasterFabric(Network& network, std::string server_host,
    MultiMasterOptions options = {});

  Topology topology() const override { return Topology::Multi; }
  MultiMasterSystem& system() { return _system; }

  void add_node(const NodeId& node, const std::string& host) override;
  TopicHandle advertise(const NodeId& node, const std::string& topic,
    const std::string& msg_type) override;
  SubscriptionHandle subscribe(const NodeId& node, const std::string& topic,
    const std::string& msg_type, Callback callback) override;

  void start() override;
  messaging::TimeNs warmup() const override;

private:
  MultiMasterSystem _system;
  std::map<std::string, std::set<std::string>> _allowlists;
  bool _started = false;
};

/// Robots handshake with the cloud and keep their nodes in their own graph.
/// Server nodes live in one container. Each topic that must cross the
/// boundary gets an interface pair and a connection, created as soon as
/// both a publisher and a subscriber exist on opposite sides.
class CloudFabric : public Fabric
{
public:
  CloudFabric(Network& network, std::string server_host,
    std::string ctag = "fleet_ctr", CloudOptions options = {});

  Topology topology() const override { return Topology::Cloud; }
  CloudSystem& system() { return _system; }
  const std::string& ctag() const { return _ctag; }

  void add_node(const NodeId& node, const std::string& host) override;
  TopicHandle advertise(const NodeId& node, const std::string& topic,
    const std::string& msg_type) override;
  SubscriptionHandle subscribe(const NodeId& node, const std::string& topic,
    const std::string& msg_type, Callback callback) override;

  void spawn_echo(const std::string& name, const std::string& in,
    const std::string& out, const std::string& msg_type) override;

  /// Interface tag used for a topic: "up_" or "down_" plus the topic with
  /// slashes replaced by underscores.
  static std::string interface_tag(bool uplink, const std::string& topic);

private:
  struct Side
  {
    std::map<std::string, std::string> advertised;  // topic -> type
    std::map<std::string, std::string> subscribed;
  };

  bool robot_side(const NodeId& node) const;
  void link_topic(const std::string& topic);

  CloudSystem _system;
  std::string _ctag;
  Side _server;
  std::map<std::string, Side> _robots;
  std::map<NodeId, std::string> _robot_of;
};

std::unique_ptr<Fabric> make_fabric(Topology topology, Network& network,
  const std::string& server_host, const CloudOptions& cloud = {});

} // namespace fleet::topology
