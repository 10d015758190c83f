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
#include <fleet/topology/bus.hpp>

#include <optional>

namespace fleet::topology {

using messaging::make_payload;

Bus::Bus(
  Network& network,
  std::string name,
  std::string master_host,
  int master_port)
: _network(network),
  _name(std::move(name)),
  _master_host(std::move(master_host)),
  _master_port(master_port),
  _master_address(_name + "|__master")
{
  _network.attach(_master_address, _master_host);
}

std::string Bus::master_uri() const
{
  return "http://" + _master_host + ":" + std::to_string(_master_port);
}

void Bus::control(const NodeId& from, const std::string& verb, nlohmann::json body)
{
  Envelope envelope;
  envelope.topic = "/__master/" + verb;
  envelope.msg_type = "MasterCall";
  envelope.payload = make_payload(body.dump());
  envelope.sent_at = _network.now();
  envelope.sender = from;
  try
  {
    _network.send(address(from), _master_address, envelope);
  }
  catch (const Error& e)
  {
    if (e.code() == ErrorCode::LinkDown)
      throw Error(ErrorCode::MasterDown, "master unreachable: " + e.detail());
    throw;
  }
}

void Bus::notify(const NodeId& to, const std::string& verb, nlohmann::json body)
{
  Envelope envelope;
  envelope.topic = "/__master/" + verb;
  envelope.msg_type = "MasterReply";
  envelope.payload = make_payload(body.dump());
  envelope.sent_at = _network.now();
  envelope.sender = NodeId{_master_host, "master", ""};
  try
  {
    _network.send(_master_address, address(to), envelope);
  }
  catch (const Error&)
  {
    // Best effort: the peer link, not the notification, carries data.
  }
}

void Bus::register_node(const NodeId& node, const std::string& host)
{
  if (!_registry.alive())
    throw Error(ErrorCode::MasterDown, "master at " + master_uri() + " is down");
  const std::string addr = address(node);
  if (!_network.attached(addr))
    _network.attach(addr, host);
  _registry.register_node(node);
  control(node, "registerNode", {{"node", node.qualified()}, {"host", host}});
}

void Bus::register_node(
  const NodeId& node, const std::string& host, const std::string& master_uri)
{
  if (master_uri != this->master_uri())
    throw Error(ErrorCode::MasterDown, "no master at " + master_uri);
  register_node(node, host);
}

TopicHandle Bus::advertise(
  const NodeId& node, const std::string& topic, const std::string& msg_type)
{
  const auto key = std::make_pair(node, topic);
  const auto existing = _publishers.find(key);
  if (existing != _publishers.end() && existing->second->active)
  {
    if (existing->second->msg_type != msg_type)
      throw Error(ErrorCode::TypeMismatch, topic + " carries "
        + existing->second->msg_type + ", not " + msg_type);
    return TopicHandle(existing->second);
  }

  _registry.add_publisher(node, topic, msg_type);
  control(node, "registerPublisher",
    {{"node", node.qualified()}, {"topic", topic}, {"msgType", msg_type}});

  auto state = std::make_shared<PublisherState>();
  state->node = node;
  state->topic = topic;
  state->msg_type = msg_type;
  _publishers[key] = state;

  for (const auto& subscriber : _registry.subscribers(topic))
  {
    notify(subscriber, "publisherUpdate",
      {{"topic", topic}, {"publisher", node.qualified()}});
    connect(node, subscriber, topic);
  }

  if (_on_change)
    _on_change();
  return TopicHandle(state);
}

SubscriptionHandle Bus::subscribe(
  const NodeId& node, const std::string& topic, const std::string& msg_type,
  Callback callback)
{
  _registry.add_subscriber(node, topic, msg_type);
  control(node, "registerSubscriber",
    {{"node", node.qualified()}, {"topic", topic}, {"msgType", msg_type}});

  nlohmann::json publishers = nlohmann::json::array();
  for (const auto& publisher : _registry.publishers(topic))
    publishers.push_back(publisher.qualified());
  notify(node, "lookupReply", {{"topic", topic}, {"publishers", publishers}});

  if (callback)
    _network.add_handler(address(node), topic, std::move(callback));

  for (const auto& publisher : _registry.publishers(topic))
    connect(publisher, node, topic);

  return SubscriptionHandle{node, topic, msg_type};
}

void Bus::connect(
  const NodeId& publisher, const NodeId& subscriber, const std::string& topic)
{
  _links.insert(PeerLink{publisher, subscriber, topic});
}

void Bus::drop_links(const NodeId& node, const std::string* topic)
{
  for (auto it = _links.begin(); it != _links.end();)
  {
    const bool involves = it->publisher == node || it->subscriber == node;
    if (involves && (!topic || it->topic == *topic))
      it = _links.erase(it);
    else
      ++it;
  }
}

void Bus::unadvertise(const TopicHandle& handle)
{
  if (!handle._state)
    return;
  handle._state->active = false;
  _registry.remove_publisher(handle.node(), handle.topic());
  _publishers.erase({handle.node(), handle.topic()});
  for (auto it = _links.begin(); it != _links.end();)
  {
    if (it->publisher == handle.node() && it->topic == handle.topic())
      it = _links.erase(it);
    else
      ++it;
  }
  if (_on_change)
    _on_change();
}

void Bus::unsubscribe(const SubscriptionHandle& handle)
{
  _registry.remove_subscriber(handle.node, handle.topic);
  _network.clear_handlers(address(handle.node), handle.topic);
  for (auto it = _links.begin(); it != _links.end();)
  {
    if (it->subscriber == handle.node && it->topic == handle.topic)
      it = _links.erase(it);
    else
      ++it;
  }
}

void Bus::remove_node(const NodeId& node)
{
  _registry.remove_node(node);
  drop_links(node, nullptr);
  for (auto it = _publishers.begin(); it != _publishers.end();)
  {
    if (it->first.first == node)
    {
      it->second->active = false;
      it = _publishers.erase(it);
    }
    else
    {
      ++it;
    }
  }
  if (_on_change)
    _on_change();
}

void Bus::publish(const TopicHandle& handle, std::shared_ptr<const Bytes> payload)
{
  if (!handle.valid())
    throw Error(ErrorCode::InvalidArgument, "publish on an invalid handle");

  auto& state = *handle._state;
  Envelope envelope;
  envelope.topic = state.topic;
  envelope.msg_type = state.msg_type;
  envelope.payload = std::move(payload);
  envelope.msg_id = state.next_id++;
  envelope.sent_at = _network.now();
  envelope.sender = state.node;
  ++_publish_counts[state.topic];

  std::optional<Error> failure;
  const auto first = _links.lower_bound(PeerLink{state.node, NodeId{}, ""});
  for (auto it = first; it != _links.end() && it->publisher == state.node; ++it)
  {
    if (it->topic != state.topic)
      continue;
    try
    {
      _network.send(address(it->publisher), address(it->subscriber), envelope);
    }
    catch (const Error& e)
    {
      if (!failure)
        failure = e;
    }
  }
  if (failure)
    throw *failure;
}

void Bus::publish(const TopicHandle& handle, Bytes payload)
{
  publish(handle, make_payload(std::move(payload)));
}

void Bus::publish(const TopicHandle& handle, std::string_view text)
{
  publish(handle, make_payload(text));
}

std::vector<NodeId> Bus::lookup(const std::string& topic) const
{
  if (!_registry.alive())
    throw Error(ErrorCode::MasterDown, "cannot resolve " + topic);
  return _registry.publishers(topic);
}

std::vector<PeerLink> Bus::resolve_and_connect(const std::string& topic)
{
  if (!_registry.alive())
    throw Error(ErrorCode::MasterDown, "cannot resolve " + topic);
  for (const auto& publisher : _registry.publishers(topic))
    for (const auto& subscriber : _registry.subscribers(topic))
      connect(publisher, subscriber, topic);
  return links(topic);
}

std::vector<PeerLink> Bus::links() const
{
  return {_links.begin(), _links.end()};
}

std::vector<PeerLink> Bus::links(const std::string& topic) const
{
  std::vector<PeerLink> out;
  for (const auto& link : _links)
    if (link.topic == topic)
      out.push_back(link);
  return out;
}

void Bus::kill_master()
{
  _registry.kill();
}

std::uint64_t Bus::publish_count(const std::string& topic) const
{
  const auto it = _publish_counts.find(topic);
  return it == _publish_counts.end() ? 0 : it->second;
}

} // namespace fleet::topology
