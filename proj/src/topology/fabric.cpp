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
#include <fleet/topology/fabric.hpp>

#include <fleet/errors.hpp>

#include <algorithm>
#include <cctype>

namespace fleet::topology {

std::string_view to_string(Topology topology)
{
  switch (topology)
  {
    case Topology::Single: return "SMS";
    case Topology::Multi: return "MMS";
    case Topology::Cloud: return "CRS";
  }
  return "SMS";
}

Topology parse_topology(std::string_view text)
{
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
    [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "single" || lower == "sms")
    return Topology::Single;
  if (lower == "multi" || lower == "mms")
    return Topology::Multi;
  if (lower == "cloud" || lower == "crs")
    return Topology::Cloud;
  throw Error(ErrorCode::InvalidArgument, "unknown topology '" + std::string(text)
    + "' (expected single, multi or cloud)");
}

//==============================================================================
Fabric::Fabric(Network& network, std::string server_host)
: _network(network)
, _server_host(std::move(server_host))
{
}

void Fabric::publish(const TopicHandle& handle, std::shared_ptr<const Bytes> payload)
{
  bus_of(handle.node()).publish(handle, std::move(payload));
}

void Fabric::publish(const TopicHandle& handle, Bytes payload)
{
  publish(handle, messaging::make_payload(std::move(payload)));
}

void Fabric::spawn_echo(
  const std::string& name, const std::string& in, const std::string& out,
  const std::string& msg_type)
{
  const NodeId node{_server_host, name, ""};
  add_node(node, _server_host);
  const TopicHandle handle = advertise(node, out, msg_type);
  subscribe(node, in, msg_type, [this, handle](const Envelope& envelope)
    {
      publish(handle, envelope.payload);
    });
}

const std::string& Fabric::host_of(const NodeId& node) const
{
  const auto it = _hosts.find(node);
  if (it == _hosts.end())
    throw Error(ErrorCode::InvalidArgument, "unknown node " + node.qualified());
  return it->second;
}

Bus& Fabric::bus_of(const NodeId& node)
{
  const auto it = _buses.find(node);
  if (it == _buses.end())
    throw Error(ErrorCode::InvalidArgument, "unknown node " + node.qualified());
  return *it->second;
}

void Fabric::bind(const NodeId& node, Bus& bus, const std::string& host)
{
  _buses[node] = &bus;
  _hosts[node] = host;
}

//==============================================================================
SingleMasterFabric::SingleMasterFabric(Network& network, std::string server_host)
: Fabric(network, server_host)
, _system(network, server_host)
{
}

void SingleMasterFabric::add_node(const NodeId& node, const std::string& host)
{
  _system.register_node(node, host);
  bind(node, _system.bus(), host);
}

TopicHandle SingleMasterFabric::advertise(
  const NodeId& node, const std::string& topic, const std::string& msg_type)
{
  return _system.advertise(node, topic, msg_type);
}

SubscriptionHandle SingleMasterFabric::subscribe(
  const NodeId& node, const std::string& topic, const std::string& msg_type,
  Callback callback)
{
  return _system.subscribe(node, topic, msg_type, std::move(callback));
}

//==============================================================================
MultiMasterFabric::MultiMasterFabric(
  Network& network, std::string server_host, MultiMasterOptions options)
: Fabric(network, server_host)
, _system(network, options)
{
}

void MultiMasterFabric::add_node(const NodeId& node, const std::string& host)
{
  if (node.domain != host)
    throw Error(ErrorCode::InvalidArgument, "node " + node.qualified()
      + " must belong to the domain of its host " + host);
  const auto names = _system.domains();
  if (std::find(names.begin(), names.end(), host) == names.end())
  {
    _system.add_domain(host, host);
    if (_started)
      _system.start(host);
  }
  _system.register_node(node);
  bind(node, _system.domain(host).bus(), host);
}

TopicHandle MultiMasterFabric::advertise(
  const NodeId& node, const std::string& topic, const std::string& msg_type)
{
  return _system.advertise(node, topic, msg_type);
}

SubscriptionHandle MultiMasterFabric::subscribe(
  const NodeId& node, const std::string& topic, const std::string& msg_type,
  Callback callback)
{
  auto handle = _system.subscribe(node, topic, msg_type, std::move(callback));
  auto& allowlist = _allowlists[node.domain];
  if (allowlist.insert(topic).second)
    _system.sync_topics(node.domain, allowlist);
  return handle;
}

void MultiMasterFabric::start()
{
  _started = true;
  _system.start();
}

messaging::TimeNs MultiMasterFabric::warmup() const
{
  return 2 * _system.options().discovery_period + messaging::kNsPerSecond / 2;
}

//==============================================================================
CloudFabric::CloudFabric(Network& network, std::string server_host,
  std::string ctag, CloudOptions options)
: Fabric(network, server_host)
, _system(network, server_host, options)
, _ctag(std::move(ctag))
{
  _system.add_account("fleet", "fleet");
  _system.create_container(_ctag);
}

bool CloudFabric::robot_side(const NodeId& node) const
{
  return _robot_of.contains(node);
}

void CloudFabric::add_node(const NodeId& node, const std::string& host)
{
  if (host == _server_host)
  {
    Bus& bus = _system.container(_ctag).bus();
    bus.register_node(node, host);
    bind(node, bus, host);
    return;
  }
  const std::string& robot_id = host;
  if (!_system.connected(robot_id))
  {
    HandshakeRequest request;
    request.url = "http://" + _server_host + ":"
      + std::to_string(_system.options().handshake_port) + "/";
    request.user_id = "fleet";
    request.password = "fleet";
    request.robot_id = robot_id;
    _system.handshake(request, host);
  }
  Bus& bus = _system.robot_graph(robot_id, host);
  bus.register_node(node, host);
  bind(node, bus, host);
  _robot_of[node] = robot_id;
  _robots[robot_id];
}

TopicHandle CloudFabric::advertise(
  const NodeId& node, const std::string& topic, const std::string& msg_type)
{
  auto handle = bus_of(node).advertise(node, topic, msg_type);
  if (robot_side(node))
    _robots[_robot_of.at(node)].advertised[topic] = msg_type;
  else
    _server.advertised[topic] = msg_type;
  link_topic(topic);
  return handle;
}

SubscriptionHandle CloudFabric::subscribe(
  const NodeId& node, const std::string& topic, const std::string& msg_type,
  Callback callback)
{
  auto handle = bus_of(node).subscribe(node, topic, msg_type, std::move(callback));
  if (robot_side(node))
    _robots[_robot_of.at(node)].subscribed[topic] = msg_type;
  else
    _server.subscribed[topic] = msg_type;
  link_topic(topic);
  return handle;
}

void CloudFabric::spawn_echo(const std::string& name, const std::string& in,
  const std::string& out, const std::string& msg_type)
{
  NodeSpec spec;
  spec.ctag = _ctag;
  spec.ntag = name;
  spec.pkg = "echo";
  spec.exe = "echo";
  spec.args = in + ", " + out + ", " + msg_type;
  _system.spawn_node(spec);
  _server.subscribed[in] = msg_type;
  _server.advertised[out] = msg_type;
  link_topic(in);
  link_topic(out);
}

std::string CloudFabric::interface_tag(bool uplink, const std::string& topic)
{
  std::string tag = uplink ? "up" : "down";
  for (const char c : topic)
    tag += (c == '/') ? '_' : c;
  return tag;
}

void CloudFabric::link_topic(const std::string& topic)
{
  const auto wire = [this, &topic](const std::string& robot_id, bool uplink,
    const std::string& msg_type)
    {
      const std::string tag = interface_tag(uplink, topic);
      InterfaceSpec robot_end{robot_id, tag,
        uplink ? InterfaceType::Subscriber : InterfaceType::Publisher, msg_type, topic};
      InterfaceSpec cloud_end{_ctag, tag,
        uplink ? InterfaceType::Publisher : InterfaceType::Subscriber, msg_type, topic};
      _system.add_interface(robot_end);
      _system.add_interface(cloud_end);
      _system.connect(robot_id + "/" + tag, _ctag + "/" + tag);
    };

  const auto server_sub = _server.subscribed.find(topic);
  const auto server_adv = _server.advertised.find(topic);
  for (const auto& [robot_id, side] : _robots)
  {
    const auto robot_adv = side.advertised.find(topic);
    if (server_sub != _server.subscribed.end() && robot_adv != side.advertised.end())
      wire(robot_id, true, robot_adv->second);
    const auto robot_sub = side.subscribed.find(topic);
    if (server_adv != _server.advertised.end() && robot_sub != side.subscribed.end())
      wire(robot_id, false, server_adv->second);
  }
}

//==============================================================================
std::unique_ptr<Fabric> make_fabric(Topology topology, Network& network,
  const std::string& server_host, const CloudOptions& cloud)
{
  switch (topology)
  {
    case Topology::Single:
      return std::make_unique<SingleMasterFabric>(network, server_host);
    case Topology::Multi:
      return std::make_unique<MultiMasterFabric>(network, server_host);
    case Topology::Cloud:
      return std::make_unique<CloudFabric>(network, server_host, "fleet_ctr", cloud);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown topology");
}

} // namespace fleet::topology
