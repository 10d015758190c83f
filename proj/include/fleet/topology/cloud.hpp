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

#include <fleet/topology/behaviors.hpp>
#include <fleet/topology/bus.hpp>
#include <fleet/topology/cloud_config.hpp>

#include <json.hpp>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace fleet::topology {

struct CloudOptions
{
  int handshake_port = 9000;
  int ws_port = 9010;
  int internal_port = 10030;
  int master_port = 8080;
};

struct HandshakeRequest
{
  std::string url;
  std::string user_id;
  std::string password;
  std::string robot_id;

  static HandshakeRequest from_config(const CloudConfig& config);
  static HandshakeRequest from_json(const nlohmann::json& json);
  nlohmann::json to_json() const;
};

struct HandshakeResponse
{
  /// "ws://<host>:<ws_port>/<robotID>"
  std::string url;
  nlohmann::json to_json() const { return {{"url", url}}; }
};

/// Splits "scheme://host:port/path". Port is -1 when absent.
struct ParsedUrl
{
  std::string scheme;
  std::string host;
  int port = -1;
  std::string path;
};
ParsedUrl parse_url(const std::string& url);

enum class ContainerState { Created, Running, Stopped };
enum class NodeState { Running, Stopped, Failed };

std::string_view to_string(ContainerState state);
std::string_view to_string(NodeState state);

class BehaviorNode
{
public:
  const NodeSpec& spec() const { return _spec; }
  const NodeId& id() const { return _id; }
  NodeState state() const { return _state; }
  Behavior* behavior() { return _behavior.get(); }
  const Behavior* behavior() const { return _behavior.get(); }

private:
  friend class CloudSystem;
  NodeSpec _spec;
  NodeId _id;
  NodeState _state = NodeState::Running;
  std::unique_ptr<Behavior> _behavior;
};

/// In-process sandbox with its own master, namespaces and behavior nodes.
class Container
{
public:
  const std::string& ctag() const { return _ctag; }
  int comm_port() const { return _comm_port; }
  ContainerState state() const { return _state; }
  Bus& bus() { return *_bus; }
  const Bus& bus() const { return *_bus; }
  NodeId environment_node() const { return NodeId{_ctag, "rce_environment", ""}; }
  const std::map<std::string, std::unique_ptr<BehaviorNode>>& nodes() const
  {
    return _nodes;
  }
  BehaviorNode& node(const std::string& ntag);

private:
  friend class CloudSystem;
  std::string _ctag;
  int _comm_port = 0;
  ContainerState _state = ContainerState::Created;
  std::unique_ptr<Bus> _bus;
  std::map<std::string, std::unique_ptr<BehaviorNode>> _nodes;
};

struct ProvisionEntry
{
  std::string kind;    // container, node, interface, connection
  std::string tag;
  std::string status;  // created, running, exists, failed
  std::string detail;

  bool operator==(const ProvisionEntry&) const = default;
};

struct ProvisionReport
{
  std::vector<ProvisionEntry> entries;
  std::vector<std::string> warnings;

  std::size_t count(const std::string& kind, const std::string& status) const;
  std::size_t failures() const;
  /// True when nothing new was created.
  bool noop() const;
  nlohmann::json to_json() const;
};

struct ConnectionInfo
{
  std::uint64_t id = 0;
  std::string source;  // "endpointTag/interfaceTag"
  std::string sink;
  std::uint64_t forwarded = 0;
  std::uint64_t dropped = 0;
};

/// Broker topology: robots handshake with the master task set, receive a
/// robot endpoint, and provision containers, behavior nodes, interfaces and
/// connections. Data crosses the robot/cloud boundary only over declared
/// connections and is reframed once per crossing at the robot endpoint.
class CloudSystem
{
public:
  CloudSystem(Network& network, std::string server_host, CloudOptions options = {});
  ~CloudSystem();

  CloudSystem(const CloudSystem&) = delete;
  CloudSystem& operator=(const CloudSystem&) = delete;

  const CloudOptions& options() const { return _options; }
  const std::string& server_host() const { return _server_host; }
  Network& network() { return _network; }

  void add_account(const std::string& user, const std::string& password);

  /// Flat file, one "user:password" per line; blank lines and "#" comments
  /// are skipped.
  void load_accounts(const std::string& path);

  BehaviorRegistry& behaviors() { return _behaviors; }

  /// The robot's own local graph, created on first use.
  Bus& robot_graph(const std::string& robot_id, const std::string& host);
  Bus& robot_graph(const std::string& robot_id);
  bool has_robot_graph(const std::string& robot_id) const;

  /// Address of the robot-side bridge process inside the robot's graph.
  NodeId robot_client(const std::string& robot_id) const
  {
    return NodeId{robot_id, "rce_client", ""};
  }

  /// Throws AuthFailed, AlreadyConnected, ConnectFailed.
  HandshakeResponse handshake(
    const HandshakeRequest& request, const std::string& robot_host);
  bool connected(const std::string& robot_id) const;

  /// Removes the robot endpoint, its interfaces and every connection touching
  /// them; in-flight envelopes on those connections are dropped.
  void disconnect(const std::string& robot_id);

  /// Throws NotConnected, InvalidConfig, InvalidConnection, TypeMismatch or
  /// NameConflict before provisioning anything. UnknownBehavior only fails
  /// the affected node.
  ProvisionReport apply_config(const CloudConfig& config);

  Container& create_container(const std::string& ctag);
  Container& container(const std::string& ctag);
  bool has_container(const std::string& ctag) const;
  std::vector<std::string> containers() const;
  void stop_container(const std::string& ctag);

  /// Throws UnknownBehavior, NameConflict.
  BehaviorNode& spawn_node(const NodeSpec& spec);

  void add_interface(const InterfaceSpec& spec);
  bool has_interface(const std::string& tag) const;
  std::vector<InterfaceSpec> interfaces() const;

  /// Wires tag_a and tag_b; returns false if the connection already exists.
  bool connect(const std::string& tag_a, const std::string& tag_b);
  void remove_connection(const std::string& tag_a, const std::string& tag_b);
  std::vector<ConnectionInfo> connections() const;

  /// Boundary reframes performed at a robot endpoint.
  std::uint64_t reframes(const std::string& robot_id) const;

  /// Network addresses of a robot endpoint.
  static std::string ws_address(const std::string& robot_id)
  {
    return "rce|" + robot_id + "|ws";
  }
  static std::string comm_address(const std::string& robot_id)
  {
    return "rce|" + robot_id + "|comm";
  }
  std::string master_address() const { return "rce|master"; }

private:
  struct Interface
  {
    InterfaceSpec spec;
    bool robot_side = false;
    TopicHandle sink;
  };

  struct Connection
  {
    std::uint64_t id = 0;
    std::string source;
    std::string sink;
    std::uint64_t forwarded = 0;
    std::uint64_t dropped = 0;
  };

  struct Endpoint
  {
    std::string robot_id;
    std::string host;
    std::string user_id;
    std::uint64_t reframes = 0;
  };

  using Action = std::function<void(const Envelope&)>;

  struct Route
  {
    bool reframe = false;
    std::string robot_id;
    std::map<std::uint64_t, Action> actions;
  };

  bool endpoint_live(const std::string& etag) const;
  Envelope reframe(const Envelope& envelope, const std::string& robot_id);
  void add_route(const std::string& address, const std::string& topic,
    std::uint64_t conn, bool reframes, const std::string& robot_id, Action action);
  void remove_routes(std::uint64_t conn);
  void bind_source(Interface& iface);
  void bind_sink(Interface& iface);
  void send_hop(const std::string& from, const std::string& to,
    Envelope envelope, const std::string& topic, Connection& conn);
  void wire(Connection& conn);
  void check_connection(const std::string& tag_a, const std::string& tag_b,
    const std::map<std::string, InterfaceSpec>& pending) const;
  void erase_interface(const std::string& tag);
  std::string hop_topic(std::uint64_t conn) const
  {
    return "/rce/conn/" + std::to_string(conn);
  }

  Network& _network;
  std::string _server_host;
  CloudOptions _options;
  BehaviorRegistry _behaviors;
  std::map<std::string, std::string> _accounts;
  std::map<std::string, std::unique_ptr<Bus>> _robot_graphs;
  std::map<std::string, std::string> _robot_hosts;
  std::map<std::string, Endpoint> _endpoints;
  std::map<std::string, std::unique_ptr<Container>> _containers;
  std::map<std::string, Interface> _interfaces;
  std::map<std::uint64_t, Connection> _connections;
  std::map<std::pair<std::string, std::string>, Route> _routes;
  std::set<std::pair<std::string, std::string>> _source_bound;
  std::map<std::string, std::uint64_t> _reframes;
  std::uint64_t _next_connection = 1;
};

} // namespace fleet::topology
