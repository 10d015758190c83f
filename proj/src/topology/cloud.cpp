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
#include <fleet/errors.hpp>
#include <fleet/messaging/framing.hpp>
#include <fleet/topology/cloud.hpp>

#include <charconv>
#include <fstream>

namespace fleet::topology {

using messaging::make_payload;

namespace {

std::string client_link(const std::string& robot_id)
{
  return "rce|" + robot_id + "|client";
}

std::string env_comm(const std::string& ctag)
{
  return "rce|" + ctag + "|env";
}

} // anonymous namespace

HandshakeRequest HandshakeRequest::from_config(const CloudConfig& config)
{
  return {config.url, config.user_id, config.password, config.robot_id};
}

HandshakeRequest HandshakeRequest::from_json(const nlohmann::json& json)
{
  HandshakeRequest request;
  request.url = json.value("url", std::string());
  request.user_id = json.at("userID").get<std::string>();
  request.password = json.at("password").get<std::string>();
  request.robot_id = json.at("robotID").get<std::string>();
  return request;
}

nlohmann::json HandshakeRequest::to_json() const
{
  return {{"url", url}, {"userID", user_id}, {"password", password},
    {"robotID", robot_id}};
}

ParsedUrl parse_url(const std::string& url)
{
  ParsedUrl out;
  std::string_view rest = url;
  const auto scheme_end = rest.find("://");
  if (scheme_end != std::string_view::npos)
  {
    out.scheme = std::string(rest.substr(0, scheme_end));
    rest.remove_prefix(scheme_end + 3);
  }
  const auto path_begin = rest.find('/');
  std::string_view authority = rest.substr(0, path_begin);
  if (path_begin != std::string_view::npos)
    out.path = std::string(rest.substr(path_begin));
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos)
  {
    int port = -1;
    const auto digits = authority.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(
      digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc() || ptr != digits.data() + digits.size())
      throw Error(ErrorCode::InvalidArgument, "bad port in " + url);
    out.port = port;
    authority = authority.substr(0, colon);
  }
  out.host = std::string(authority);
  return out;
}

std::string_view to_string(ContainerState state)
{
  switch (state)
  {
    case ContainerState::Created: return "created";
    case ContainerState::Running: return "running";
    case ContainerState::Stopped: return "stopped";
  }
  return "";
}

std::string_view to_string(NodeState state)
{
  switch (state)
  {
    case NodeState::Running: return "running";
    case NodeState::Stopped: return "stopped";
    case NodeState::Failed: return "failed";
  }
  return "";
}

BehaviorNode& Container::node(const std::string& ntag)
{
  const auto it = _nodes.find(ntag);
  if (it == _nodes.end())
    throw Error(ErrorCode::InvalidArgument, "no node " + ntag + " in " + _ctag);
  return *it->second;
}

std::size_t ProvisionReport::count(
  const std::string& kind, const std::string& status) const
{
  std::size_t n = 0;
  for (const auto& entry : entries)
    n += entry.kind == kind && entry.status == status;
  return n;
}

std::size_t ProvisionReport::failures() const
{
  std::size_t n = 0;
  for (const auto& entry : entries)
    n += entry.status == "failed";
  return n;
}

bool ProvisionReport::noop() const
{
  for (const auto& entry : entries)
    if (entry.status != "exists")
      return false;
  return true;
}

nlohmann::json ProvisionReport::to_json() const
{
  nlohmann::json list = nlohmann::json::array();
  for (const auto& entry : entries)
  {
    nlohmann::json item{{"kind", entry.kind}, {"tag", entry.tag},
      {"status", entry.status}};
    if (!entry.detail.empty())
      item["detail"] = entry.detail;
    list.push_back(item);
  }
  return {{"entries", list}, {"warnings", warnings}};
}

//==============================================================================
CloudSystem::CloudSystem(
  Network& network, std::string server_host, CloudOptions options)
: _network(network),
  _server_host(std::move(server_host)),
  _options(options),
  _behaviors(BehaviorRegistry::with_builtins())
{
  _network.attach(master_address(), _server_host);
}

CloudSystem::~CloudSystem()
{
  for (const auto& [robot_id, endpoint] : _endpoints)
  {
    _network.detach(ws_address(robot_id));
    _network.detach(comm_address(robot_id));
  }
  for (const auto& [robot_id, graph] : _robot_graphs)
    _network.detach(client_link(robot_id));
  for (const auto& [ctag, container] : _containers)
    _network.detach(env_comm(ctag));
  _network.detach(master_address());
}

void CloudSystem::add_account(const std::string& user, const std::string& password)
{
  _accounts[user] = password;
}

void CloudSystem::load_accounts(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot read accounts file " + path);
  std::string line;
  int number = 0;
  while (std::getline(in, line))
  {
    ++number;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line.front() == '#')
      continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos || colon == 0)
      throw Error(ErrorCode::InvalidConfig, path + ":" + std::to_string(number)
        + ": expected user:password");
    add_account(line.substr(0, colon), line.substr(colon + 1));
  }
}

Bus& CloudSystem::robot_graph(const std::string& robot_id, const std::string& host)
{
  const auto it = _robot_graphs.find(robot_id);
  if (it != _robot_graphs.end())
  {
    if (_robot_hosts.at(robot_id) != host)
      throw Error(ErrorCode::InvalidArgument, "robot " + robot_id
        + " runs on " + _robot_hosts.at(robot_id) + ", not " + host);
    return *it->second;
  }
  auto bus = std::make_unique<Bus>(_network, "robot:" + robot_id, host);
  bus->register_node(robot_client(robot_id), host);
  _network.attach(client_link(robot_id), host);
  _robot_hosts[robot_id] = host;
  return *_robot_graphs.emplace(robot_id, std::move(bus)).first->second;
}

Bus& CloudSystem::robot_graph(const std::string& robot_id)
{
  const auto it = _robot_graphs.find(robot_id);
  if (it == _robot_graphs.end())
    throw Error(ErrorCode::NotConnected, "no robot " + robot_id);
  return *it->second;
}

bool CloudSystem::has_robot_graph(const std::string& robot_id) const
{
  return _robot_graphs.contains(robot_id);
}

HandshakeResponse CloudSystem::handshake(
  const HandshakeRequest& request, const std::string& robot_host)
{
  const ParsedUrl url = parse_url(request.url);
  if (url.port != -1 && url.port != _options.handshake_port)
    throw Error(ErrorCode::ConnectFailed, "nothing listens on port "
      + std::to_string(url.port) + "; the master accepts handshakes on "
      + std::to_string(_options.handshake_port));

  const auto account = _accounts.find(request.user_id);
  if (account == _accounts.end() || account->second != request.password)
    throw Error(ErrorCode::AuthFailed, "bad credentials for " + request.user_id);
  if (request.robot_id.empty())
    throw Error(ErrorCode::AuthFailed, "empty robotID");
  if (_endpoints.contains(request.robot_id))
    throw Error(ErrorCode::AlreadyConnected, request.robot_id);

  Bus& graph = robot_graph(request.robot_id, robot_host);
  (void)graph;

  Envelope call;
  call.topic = "/__rce/handshake";
  call.msg_type = "HandshakeRequest";
  call.payload = make_payload(nlohmann::json{
    {"userID", request.user_id}, {"robotID", request.robot_id}}.dump());
  call.sent_at = _network.now();
  call.sender = robot_client(request.robot_id);
  try
  {
    _network.send(client_link(request.robot_id), master_address(), call);
  }
  catch (const Error& e)
  {
    throw Error(ErrorCode::ConnectFailed, e.detail());
  }

  HandshakeResponse response;
  const std::string host = url.host.empty() ? _server_host : url.host;
  response.url = "ws://" + host + ":" + std::to_string(_options.ws_port)
    + "/" + request.robot_id;

  Envelope reply;
  reply.topic = "/__rce/handshake";
  reply.msg_type = "HandshakeResponse";
  reply.payload = make_payload(response.to_json().dump());
  reply.sent_at = _network.now();
  reply.sender = NodeId{_server_host, "rce_master", ""};
  try
  {
    _network.send(master_address(), client_link(request.robot_id), reply);
  }
  catch (const Error&)
  {
  }

  _endpoints[request.robot_id] =
    Endpoint{request.robot_id, robot_host, request.user_id, 0};
  _network.attach(ws_address(request.robot_id), _server_host);
  _network.attach(comm_address(request.robot_id), _server_host);
  return response;
}

bool CloudSystem::connected(const std::string& robot_id) const
{
  return _endpoints.contains(robot_id);
}

void CloudSystem::disconnect(const std::string& robot_id)
{
  if (!_endpoints.contains(robot_id))
    throw Error(ErrorCode::NotConnected, robot_id);

  std::vector<std::string> doomed;
  for (const auto& [tag, iface] : _interfaces)
    if (iface.robot_side && iface.spec.etag == robot_id)
      doomed.push_back(tag);

  for (auto it = _connections.begin(); it != _connections.end();)
  {
    const auto& conn = it->second;
    bool touches = false;
    for (const auto& tag : doomed)
      touches = touches || conn.source == tag || conn.sink == tag;
    if (touches)
      remove_routes(it->first);
    it = touches ? _connections.erase(it) : std::next(it);
  }
  for (const auto& tag : doomed)
    erase_interface(tag);

  _network.detach(ws_address(robot_id));
  _network.detach(comm_address(robot_id));
  for (auto it = _routes.begin(); it != _routes.end();)
  {
    const bool gone = it->first.first == ws_address(robot_id)
      || it->first.first == comm_address(robot_id);
    it = gone ? _routes.erase(it) : std::next(it);
  }
  _endpoints.erase(robot_id);
}

//==============================================================================
Container& CloudSystem::create_container(const std::string& ctag)
{
  if (ctag.empty())
    throw Error(ErrorCode::InvalidConfig, "empty cTag");
  if (_containers.contains(ctag))
    throw Error(ErrorCode::NameConflict, "container " + ctag + " exists");
  if (_endpoints.contains(ctag) || _robot_graphs.contains(ctag))
    throw Error(ErrorCode::NameConflict, ctag + " is a robot ID");

  auto container = std::make_unique<Container>();
  container->_ctag = ctag;
  container->_comm_port = _options.internal_port;
  container->_bus = std::make_unique<Bus>(
    _network, "container:" + ctag, _server_host);
  container->_bus->register_node(container->environment_node(), _server_host);
  _network.attach(env_comm(ctag), _server_host);
  container->_state = ContainerState::Running;
  return *_containers.emplace(ctag, std::move(container)).first->second;
}

Container& CloudSystem::container(const std::string& ctag)
{
  const auto it = _containers.find(ctag);
  if (it == _containers.end())
    throw Error(ErrorCode::InvalidArgument, "no container " + ctag);
  return *it->second;
}

bool CloudSystem::has_container(const std::string& ctag) const
{
  return _containers.contains(ctag);
}

std::vector<std::string> CloudSystem::containers() const
{
  std::vector<std::string> out;
  for (const auto& [ctag, container] : _containers)
    out.push_back(ctag);
  return out;
}

void CloudSystem::stop_container(const std::string& ctag)
{
  Container& box = container(ctag);
  if (box._state == ContainerState::Stopped)
    return;
  for (auto& [ntag, node] : box._nodes)
  {
    if (node->_state != NodeState::Running)
      continue;
    node->_behavior->stop();
    box._bus->remove_node(node->_id);
    node->_state = NodeState::Stopped;
  }
  box._state = ContainerState::Stopped;
}

BehaviorNode& CloudSystem::spawn_node(const NodeSpec& spec)
{
  Container& box = container(spec.ctag);
  if (box._state == ContainerState::Stopped)
    throw Error(ErrorCode::InvalidArgument, "container " + spec.ctag + " is stopped");
  if (box._nodes.contains(spec.ntag))
    throw Error(ErrorCode::NameConflict, "node " + spec.ntag
      + " already runs in " + spec.ctag);

  auto behavior = _behaviors.create(spec.pkg, spec.exe);

  auto node = std::make_unique<BehaviorNode>();
  node->_spec = spec;
  node->_id = NodeId{spec.ctag, spec.ntag, spec.ns};
  box._bus->register_node(node->_id, _server_host);

  BehaviorContext context{*box._bus, node->_id, _server_host, spec.ns,
    parse_topic_args(spec.args)};
  try
  {
    behavior->start(context);
  }
  catch (...)
  {
    box._bus->remove_node(node->_id);
    throw;
  }
  node->_behavior = std::move(behavior);
  node->_state = NodeState::Running;
  return *box._nodes.emplace(spec.ntag, std::move(node)).first->second;
}

//==============================================================================
bool CloudSystem::endpoint_live(const std::string& etag) const
{
  if (_endpoints.contains(etag))
    return true;
  const auto it = _containers.find(etag);
  return it != _containers.end() && it->second->_state != ContainerState::Stopped;
}

Envelope CloudSystem::reframe(const Envelope& envelope, const std::string& robot_id)
{
  const Bytes frame = messaging::encode_frame(envelope);
  messaging::FrameDecoder decoder;
  decoder.feed(frame);
  auto out = decoder.next();
  if (!out)
    throw Error(ErrorCode::InvalidArgument, "reframe lost an envelope");
  ++_reframes[robot_id];
  _network.count_event(ws_address(robot_id));
  return std::move(*out);
}

std::uint64_t CloudSystem::reframes(const std::string& robot_id) const
{
  const auto it = _reframes.find(robot_id);
  return it == _reframes.end() ? 0 : it->second;
}

void CloudSystem::add_route(
  const std::string& address, const std::string& topic, std::uint64_t conn,
  bool reframes, const std::string& robot_id, Action action)
{
  const auto key = std::make_pair(address, topic);
  const bool fresh = !_routes.contains(key);
  auto& route = _routes[key];
  route.reframe = reframes;
  route.robot_id = robot_id;
  route.actions[conn] = std::move(action);
  if (!fresh)
    return;

  _network.add_handler(address, topic, [this, key](const Envelope& envelope)
    {
      const auto it = _routes.find(key);
      if (it == _routes.end() || it->second.actions.empty())
        return;
      const auto actions = it->second.actions;
      if (it->second.reframe)
      {
        const Envelope internal = this->reframe(envelope, it->second.robot_id);
        for (const auto& [id, action] : actions)
          action(internal);
        return;
      }
      for (const auto& [id, action] : actions)
        action(envelope);
    });
}

void CloudSystem::remove_routes(std::uint64_t conn)
{
  for (auto& [key, route] : _routes)
    route.actions.erase(conn);
}

void CloudSystem::send_hop(
  const std::string& from, const std::string& to, Envelope envelope,
  const std::string& topic, Connection& conn)
{
  envelope.topic = topic;
  try
  {
    _network.send(from, to, envelope);
  }
  catch (const Error&)
  {
    ++conn.dropped;
  }
}

void CloudSystem::bind_source(Interface& iface)
{
  const auto& spec = iface.spec;
  const auto key = std::make_pair(spec.etag, spec.addr);
  if (_source_bound.contains(key))
    return;

  if (iface.robot_side)
  {
    const std::string robot_id = spec.etag;
    robot_graph(robot_id).subscribe(robot_client(robot_id), spec.addr, spec.cls,
      [this, robot_id, addr = spec.addr](const Envelope& envelope)
      {
        if (!_endpoints.contains(robot_id))
          return;
        // Only data with somewhere to go leaves the robot.
        Connection* first = nullptr;
        for (auto& [id, conn] : _connections)
        {
          const auto& source = _interfaces.at(conn.source);
          if (source.robot_side && source.spec.etag == robot_id
            && source.spec.addr == addr)
          {
            first = &conn;
            break;
          }
        }
        if (first)
          send_hop(client_link(robot_id), ws_address(robot_id), envelope,
            addr, *first);
      });
  }
  else
  {
    const std::string ctag = spec.etag;
    Container& box = container(ctag);
    box._bus->subscribe(box.environment_node(), spec.addr, spec.cls,
      [this, ctag, addr = spec.addr](const Envelope& envelope)
      {
        const auto box_it = _containers.find(ctag);
        if (box_it == _containers.end()
          || box_it->second->_state == ContainerState::Stopped)
          return;
        for (auto& [id, conn] : _connections)
        {
          const auto& source = _interfaces.at(conn.source);
          if (source.robot_side || source.spec.etag != ctag
            || source.spec.addr != addr)
            continue;
          const auto& sink = _interfaces.at(conn.sink);
          const std::string to = sink.robot_side
            ? comm_address(sink.spec.etag) : env_comm(sink.spec.etag);
          send_hop(env_comm(ctag), to, envelope, hop_topic(id), conn);
        }
      });
  }
  _source_bound.insert(key);
}

void CloudSystem::bind_sink(Interface& iface)
{
  const auto& spec = iface.spec;
  if (iface.robot_side)
  {
    iface.sink = robot_graph(spec.etag).advertise(
      robot_client(spec.etag), spec.addr, spec.cls);
  }
  else
  {
    Container& box = container(spec.etag);
    iface.sink = box._bus->advertise(box.environment_node(), spec.addr, spec.cls);
  }
}

void CloudSystem::add_interface(const InterfaceSpec& spec)
{
  const std::string tag = spec.etag + "/" + spec.itag;
  const auto existing = _interfaces.find(tag);
  if (existing != _interfaces.end())
  {
    if (existing->second.spec == spec)
      return;
    throw Error(ErrorCode::NameConflict, "interface " + tag
      + " already declared differently");
  }
  messaging::require_valid_topic(spec.addr);

  Interface iface;
  iface.spec = spec;
  if (_containers.contains(spec.etag))
  {
    if (_containers.at(spec.etag)->_state == ContainerState::Stopped)
      throw Error(ErrorCode::InvalidArgument, "container " + spec.etag
        + " is stopped");
    iface.robot_side = false;
  }
  else if (_endpoints.contains(spec.etag))
  {
    iface.robot_side = true;
  }
  else
  {
    throw Error(ErrorCode::NotConnected, "no endpoint " + spec.etag);
  }

  if (is_source(spec.type))
    bind_source(iface);
  else
    bind_sink(iface);
  _interfaces.emplace(tag, std::move(iface));
}

bool CloudSystem::has_interface(const std::string& tag) const
{
  return _interfaces.contains(tag);
}

std::vector<InterfaceSpec> CloudSystem::interfaces() const
{
  std::vector<InterfaceSpec> out;
  for (const auto& [tag, iface] : _interfaces)
    out.push_back(iface.spec);
  return out;
}

void CloudSystem::erase_interface(const std::string& tag)
{
  const auto it = _interfaces.find(tag);
  if (it == _interfaces.end())
    return;
  const Interface iface = it->second;
  _interfaces.erase(it);

  const auto& spec = iface.spec;
  bool shared = false;
  for (const auto& [other_tag, other] : _interfaces)
    shared = shared || (other.spec.etag == spec.etag
      && other.spec.addr == spec.addr
      && is_source(other.spec.type) == is_source(spec.type));
  if (shared)
    return;

  Bus& bus = iface.robot_side ? robot_graph(spec.etag) : container(spec.etag).bus();
  const NodeId gateway = iface.robot_side
    ? robot_client(spec.etag) : container(spec.etag).environment_node();
  if (is_source(spec.type))
  {
    bus.unsubscribe(SubscriptionHandle{gateway, spec.addr, spec.cls});
    _source_bound.erase({spec.etag, spec.addr});
  }
  else
  {
    bus.unadvertise(iface.sink);
  }
}

void CloudSystem::check_connection(
  const std::string& tag_a, const std::string& tag_b,
  const std::map<std::string, InterfaceSpec>& pending) const
{
  const auto resolve = [&](const std::string& tag) -> InterfaceSpec
    {
      split_connection_tag(tag);
      const auto declared = pending.find(tag);
      if (declared != pending.end())
        return declared->second;
      const auto live = _interfaces.find(tag);
      if (live != _interfaces.end())
        return live->second.spec;
      throw Error(ErrorCode::InvalidConnection,
        "connection references undeclared interface '" + tag + "'");
    };
  const InterfaceSpec a = resolve(tag_a);
  const InterfaceSpec b = resolve(tag_b);
  if (!compatible(a.type, b.type))
    throw Error(ErrorCode::TypeMismatch, tag_a + " (" + std::string(to_string(a.type))
      + ") cannot connect to " + tag_b + " (" + std::string(to_string(b.type)) + ")");
  if (a.cls != b.cls)
    throw Error(ErrorCode::TypeMismatch, tag_a + " carries " + a.cls + " but "
      + tag_b + " carries " + b.cls);
}

bool CloudSystem::connect(const std::string& tag_a, const std::string& tag_b)
{
  check_connection(tag_a, tag_b, {});
  const auto& a = _interfaces.at(tag_a);
  const std::string source = is_source(a.spec.type) ? tag_a : tag_b;
  const std::string sink = is_source(a.spec.type) ? tag_b : tag_a;

  for (const auto& [id, conn] : _connections)
    if (conn.source == source && conn.sink == sink)
      return false;

  for (const auto& tag : {source, sink})
  {
    const auto etag = _interfaces.at(tag).spec.etag;
    if (!endpoint_live(etag))
      throw Error(ErrorCode::NotConnected, "endpoint " + etag + " is not live");
  }

  const std::uint64_t id = _next_connection++;
  auto& conn = _connections[id];
  conn.id = id;
  conn.source = source;
  conn.sink = sink;
  wire(conn);
  return true;
}

void CloudSystem::wire(Connection& conn)
{
  const std::uint64_t id = conn.id;
  const auto& source = _interfaces.at(conn.source).spec;
  const auto& sink = _interfaces.at(conn.sink);

  if (_interfaces.at(conn.source).robot_side)
  {
    // Robot data enters its endpoint once and fans out from there.
    const std::string robot_id = source.etag;
    add_route(ws_address(robot_id), source.addr, id, true, robot_id,
      [this, id, robot_id](const Envelope& envelope)
      {
        const auto it = _connections.find(id);
        if (it == _connections.end())
          return;
        const auto& target = _interfaces.at(it->second.sink);
        const std::string to = target.robot_side
          ? comm_address(target.spec.etag) : env_comm(target.spec.etag);
        send_hop(comm_address(robot_id), to, envelope, hop_topic(id), it->second);
      });
  }

  if (sink.robot_side)
  {
    const std::string robot_id = sink.spec.etag;
    add_route(comm_address(robot_id), hop_topic(id), id, true, robot_id,
      [this, id, robot_id](const Envelope& envelope)
      {
        const auto it = _connections.find(id);
        if (it == _connections.end())
          return;
        const auto& target = _interfaces.at(it->second.sink);
        ++it->second.forwarded;
        send_hop(ws_address(robot_id), client_link(robot_id), envelope,
          target.spec.addr, it->second);
      });
    // Every arrival is published once, however many connections feed it.
    add_route(client_link(robot_id), sink.spec.addr, 0, false, robot_id,
      [this, robot_id, addr = sink.spec.addr](const Envelope& envelope)
      {
        for (auto& [tag, iface] : _interfaces)
        {
          if (iface.robot_side && iface.spec.etag == robot_id
            && iface.spec.addr == addr && !is_source(iface.spec.type))
          {
            robot_graph(robot_id).publish(iface.sink, envelope.payload);
            return;
          }
        }
      });
  }
  else
  {
    const std::string ctag = sink.spec.etag;
    add_route(env_comm(ctag), hop_topic(id), id, false, "",
      [this, id, ctag](const Envelope& envelope)
      {
        const auto it = _connections.find(id);
        if (it == _connections.end())
          return;
        const auto box = _containers.find(ctag);
        if (box == _containers.end()
          || box->second->_state == ContainerState::Stopped)
        {
          ++it->second.dropped;
          return;
        }
        auto& target = _interfaces.at(it->second.sink);
        ++it->second.forwarded;
        box->second->_bus->publish(target.sink, envelope.payload);
      });
  }
}

void CloudSystem::remove_connection(const std::string& tag_a, const std::string& tag_b)
{
  for (auto it = _connections.begin(); it != _connections.end(); ++it)
  {
    const auto& conn = it->second;
    if ((conn.source == tag_a && conn.sink == tag_b)
      || (conn.source == tag_b && conn.sink == tag_a))
    {
      remove_routes(it->first);
      _connections.erase(it);
      return;
    }
  }
}

std::vector<ConnectionInfo> CloudSystem::connections() const
{
  std::vector<ConnectionInfo> out;
  for (const auto& [id, conn] : _connections)
    out.push_back({id, conn.source, conn.sink, conn.forwarded, conn.dropped});
  return out;
}

//==============================================================================
ProvisionReport CloudSystem::apply_config(const CloudConfig& config)
{
  if (!_endpoints.contains(config.robot_id))
    throw Error(ErrorCode::NotConnected, config.robot_id
      + " has not completed the handshake");
  config.validate();

  std::map<std::string, InterfaceSpec> pending;
  for (const auto& spec : config.interfaces)
  {
    const std::string tag = spec.etag + "/" + spec.itag;
    const auto live = _interfaces.find(tag);
    if (live != _interfaces.end() && !(live->second.spec == spec))
      throw Error(ErrorCode::NameConflict, "interface " + tag
        + " already declared differently");
    pending.emplace(tag, spec);
  }
  for (const auto& conn : config.connections)
    check_connection(conn.tag_a, conn.tag_b, pending);
  for (const auto& spec : config.containers)
    if (_endpoints.contains(spec.ctag) && spec.ctag != config.robot_id)
      throw Error(ErrorCode::NameConflict, spec.ctag + " is a robot ID");

  ProvisionReport report;
  report.warnings = config.warnings;

  for (const auto& spec : config.containers)
  {
    if (_containers.contains(spec.ctag))
    {
      report.entries.push_back({"container", spec.ctag, "exists", ""});
      continue;
    }
    create_container(spec.ctag);
    report.entries.push_back({"container", spec.ctag, "created", ""});
  }

  for (const auto& spec : config.nodes)
  {
    const std::string tag = spec.ctag + "/" + spec.ntag;
    auto& nodes = container(spec.ctag)._nodes;
    const auto existing = nodes.find(spec.ntag);
    if (existing != nodes.end())
    {
      if (existing->second->_spec == spec)
        report.entries.push_back({"node", tag, "exists", ""});
      else
        report.entries.push_back({"node", tag, "failed",
          "NameConflict: nTag already runs with a different spec"});
      continue;
    }
    try
    {
      spawn_node(spec);
      report.entries.push_back({"node", tag, "running", ""});
    }
    catch (const Error& e)
    {
      report.entries.push_back({"node", tag, "failed", e.what()});
    }
  }

  for (const auto& spec : config.interfaces)
  {
    const std::string tag = spec.etag + "/" + spec.itag;
    if (_interfaces.contains(tag))
    {
      report.entries.push_back({"interface", tag, "exists", ""});
      continue;
    }
    add_interface(spec);
    report.entries.push_back({"interface", tag, "created", ""});
  }

  for (const auto& conn : config.connections)
  {
    const std::string tag = conn.tag_a + " <-> " + conn.tag_b;
    const bool created = connect(conn.tag_a, conn.tag_b);
    report.entries.push_back({"connection", tag, created ? "created" : "exists", ""});
  }
  return report;
}

} // namespace fleet::topology
