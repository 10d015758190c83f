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
#include <fleet/topology/multi_master.hpp>

namespace fleet::topology {

using messaging::make_payload;

nlohmann::json Heartbeat::to_json() const
{
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [topic, msg_type] : topics)
    list.push_back({{"topic", topic}, {"msgType", msg_type}});
  return {{"domain", domain}, {"address", address}, {"topics", list}, {"seq", seq}};
}

Heartbeat Heartbeat::from_json(const nlohmann::json& json)
{
  Heartbeat hb;
  hb.domain = json.at("domain").get<std::string>();
  hb.address = json.at("address").get<std::string>();
  hb.seq = json.at("seq").get<std::uint64_t>();
  for (const auto& entry : json.at("topics"))
  {
    if (entry.is_string())
      hb.topics[entry.get<std::string>()] = "";
    else
      hb.topics[entry.at("topic").get<std::string>()] =
        entry.value("msgType", std::string());
  }
  return hb;
}

bool allowlist_matches(
  const std::set<std::string>& allowlist, const std::string& topic)
{
  if (allowlist.contains(topic))
    return true;
  for (const auto& pattern : allowlist)
  {
    if (pattern.size() < 2 || pattern.compare(pattern.size() - 2, 2, "/*") != 0)
      continue;
    const std::string_view prefix(pattern.data(), pattern.size() - 1);
    if (topic.size() > prefix.size() && topic.compare(0, prefix.size(), prefix) == 0)
      return true;
  }
  return false;
}

//==============================================================================
DomainRegistry::DomainRegistry(
  Network& network, std::string name, std::string host)
: _name(std::move(name)),
  _host(std::move(host)),
  _bus(std::make_unique<Bus>(network, _name, _host))
{
}

//==============================================================================
MultiMasterSystem::MultiMasterSystem(Network& network, MultiMasterOptions options)
: _network(network),
  _options(std::move(options))
{
  if (_options.discovery_period <= 0 || _options.expiry_periods < 1)
    throw Error(ErrorCode::InvalidArgument, "invalid discovery timing");
}

DomainRegistry& MultiMasterSystem::add_domain(
  const std::string& name, const std::string& host)
{
  if (_domains.contains(name))
    throw Error(ErrorCode::NameConflict, "domain " + name + " already exists");

  auto registry = std::make_unique<DomainRegistry>(_network, name, host);
  auto& local = *registry;
  _domains.emplace(name, std::move(registry));

  _network.attach(local.address(), host);
  _network.add_handler(local.address(), "/__discovery",
    [this, &local](const Envelope& envelope) { on_heartbeat(local, envelope); });

  local.bus().register_node(local.sync_node(), host);
  local.bus().set_on_change([this, &local]() { schedule_push(local); });
  return local;
}

DomainRegistry& MultiMasterSystem::domain(const std::string& name)
{
  const auto it = _domains.find(name);
  if (it == _domains.end())
    throw Error(ErrorCode::InvalidArgument, "unknown domain " + name);
  return *it->second;
}

const DomainRegistry& MultiMasterSystem::domain(const std::string& name) const
{
  const auto it = _domains.find(name);
  if (it == _domains.end())
    throw Error(ErrorCode::InvalidArgument, "unknown domain " + name);
  return *it->second;
}

std::vector<std::string> MultiMasterSystem::domains() const
{
  std::vector<std::string> out;
  for (const auto& [name, registry] : _domains)
    out.push_back(name);
  return out;
}

void MultiMasterSystem::start()
{
  for (const auto& [name, registry] : _domains)
    start(name);
}

void MultiMasterSystem::start(const std::string& name)
{
  auto& local = domain(name);
  if (local._announcing)
    return;
  local._announcing = true;
  _network.loop().schedule_every(_network.now(), _options.discovery_period,
    [this, &local]()
    {
      if (!local._announcing)
        return false;
      announce(local.name());
      return true;
    });
}

void MultiMasterSystem::stop_announcing(const std::string& name)
{
  domain(name)._announcing = false;
}

Heartbeat MultiMasterSystem::make_heartbeat(DomainRegistry& local)
{
  Heartbeat hb;
  hb.domain = local.name();
  hb.address = local.bus().master_uri();

  // Proxied topics are not re-announced, so synced data never echoes back.
  const NodeId sync = local.sync_node();
  for (const auto& [topic, record] : local.bus().registry().records())
  {
    for (const auto& publisher : record.publishers)
    {
      if (publisher != sync)
      {
        hb.topics[topic] = record.msg_type;
        break;
      }
    }
  }
  return hb;
}

void MultiMasterSystem::announce(const std::string& name)
{
  auto& local = domain(name);
  expire_peers(local);

  Heartbeat hb = make_heartbeat(local);
  hb.seq = ++local._seq;
  local._announced = hb.topics;

  Envelope envelope;
  envelope.topic = "/__discovery";
  envelope.msg_type = "Heartbeat";
  envelope.payload = make_payload(hb.to_json().dump());
  envelope.msg_id = hb.seq;
  envelope.sent_at = _network.now();
  envelope.sender = NodeId{local.name(), "master_discovery", ""};

  for (const auto& [other_name, other] : _domains)
  {
    if (other_name == name)
      continue;
    try
    {
      _network.send(local.address(), other->address(), envelope);
    }
    catch (const Error&)
    {
      // Broadcast is best effort.
    }
  }
}

void MultiMasterSystem::schedule_push(DomainRegistry& local)
{
  if (!local._announcing || local._push_pending)
    return;
  local._push_pending = true;
  _network.loop().schedule_after(0, [this, &local]()
    {
      local._push_pending = false;
      if (!local._announcing)
        return;
      if (make_heartbeat(local).topics != local._announced)
        announce(local.name());
    });
}

void MultiMasterSystem::on_heartbeat(DomainRegistry& local, const Envelope& envelope)
{
  Heartbeat hb;
  try
  {
    hb = Heartbeat::from_json(nlohmann::json::parse(envelope.payload_string()));
  }
  catch (const std::exception&)
  {
    return;
  }
  if (hb.domain == local.name())
    return;

  auto& peer = local._peers[hb.domain];
  peer.address = hb.address;
  peer.last_heartbeat = _network.now();
  peer.seq = hb.seq;
  peer.topics = std::move(hb.topics);

  refresh_sync(local);
}

void MultiMasterSystem::refresh_sync(DomainRegistry& local)
{
  for (const auto& [peer_name, info] : local._peers)
  {
    for (const auto& [topic, msg_type] : info.topics)
    {
      if (!allowlist_matches(local._allowlist, topic))
        continue;
      if (local._bindings.contains({peer_name, topic}))
        continue;
      bind(local, peer_name, topic, msg_type);
    }
  }
}

void MultiMasterSystem::bind(
  DomainRegistry& local, const std::string& peer, const std::string& topic,
  const std::string& msg_type)
{
  const auto it = _domains.find(peer);
  if (it == _domains.end())
    return;
  auto& remote = *it->second;
  const NodeId sync = local.sync_node();

  try
  {
    if (!remote.bus().registered(sync))
      remote.bus().register_node(sync, local.host());

    Bus::Callback callback;
    if (!local._proxies.contains(topic))
    {
      local._proxies[topic] = local.bus().advertise(sync, topic, msg_type);
      callback = [&local, topic](const Envelope& envelope)
        {
          const auto proxy = local._proxies.find(topic);
          if (proxy == local._proxies.end() || !proxy->second.valid())
            return;
          local.bus().publish(proxy->second, envelope.payload);
        };
    }
    remote.bus().subscribe(sync, topic, msg_type, std::move(callback));
    local._bindings.insert({peer, topic});
  }
  catch (const Error&)
  {
    // A dead remote master or a type clash leaves the topic unbound; the next
    // heartbeat retries.
  }
}

void MultiMasterSystem::expire_peers(DomainRegistry& local)
{
  const TimeNs horizon = _options.discovery_period * _options.expiry_periods;
  std::vector<std::string> expired;
  for (const auto& [peer_name, info] : local._peers)
    if (_network.now() - info.last_heartbeat > horizon)
      expired.push_back(peer_name);

  for (const auto& peer_name : expired)
  {
    local._peers.erase(peer_name);
    const auto remote = _domains.find(peer_name);
    for (auto it = local._bindings.begin(); it != local._bindings.end();)
    {
      if (it->peer != peer_name)
      {
        ++it;
        continue;
      }
      if (remote != _domains.end())
      {
        remote->second->bus().unsubscribe(
          SubscriptionHandle{local.sync_node(), it->topic, ""});
      }
      const std::string topic = it->topic;
      it = local._bindings.erase(it);

      bool still_bound = false;
      for (const auto& binding : local._bindings)
        still_bound = still_bound || binding.topic == topic;
      if (!still_bound)
      {
        const auto proxy = local._proxies.find(topic);
        if (proxy != local._proxies.end())
        {
          local.bus().unadvertise(proxy->second);
          local._proxies.erase(proxy);
        }
      }
    }
  }
}

void MultiMasterSystem::sync_topics(
  const std::string& name, std::set<std::string> allowlist)
{
  auto& local = domain(name);
  local._allowlist = std::move(allowlist);
  refresh_sync(local);
}

std::shared_ptr<RelayNode> MultiMasterSystem::relay(
  const std::string& name, const std::string& source,
  const std::string& destination)
{
  if (source == destination)
    throw Error(ErrorCode::InvalidRelay, "relay " + source + " onto itself");
  messaging::require_valid_topic(source);
  messaging::require_valid_topic(destination);

  auto& local = domain(name);
  const auto msg_type = local.bus().registry().msg_type(source);
  if (!msg_type)
    throw Error(ErrorCode::InvalidRelay, source + " is not advertised in " + name);

  auto relay = std::make_shared<RelayNode>();
  relay->_node = NodeId{name, "relay_" + std::to_string(++local._relay_count), ""};
  relay->_source = source;
  relay->_destination = destination;

  local.bus().register_node(relay->_node, local.host());
  relay->_output = local.bus().advertise(relay->_node, destination, *msg_type);

  std::weak_ptr<RelayNode> weak = relay;
  local.bus().subscribe(relay->_node, source, *msg_type,
    [&local, weak](const Envelope& envelope)
    {
      auto self = weak.lock();
      if (!self)
        return;
      ++self->_forwarded;
      local.bus().publish(self->_output, envelope.payload);
    });
  return relay;
}

void MultiMasterSystem::register_node(const NodeId& node)
{
  auto& local = domain(node.domain);
  local.bus().register_node(node, local.host());
}

TopicHandle MultiMasterSystem::advertise(
  const NodeId& node, const std::string& topic, const std::string& msg_type)
{
  return domain(node.domain).bus().advertise(node, topic, msg_type);
}

SubscriptionHandle MultiMasterSystem::subscribe(
  const NodeId& node, const std::string& topic, const std::string& msg_type,
  Bus::Callback callback)
{
  return domain(node.domain).bus().subscribe(
    node, topic, msg_type, std::move(callback));
}

void MultiMasterSystem::publish(const TopicHandle& handle, Bytes payload)
{
  domain(handle.node().domain).bus().publish(handle, std::move(payload));
}

std::vector<NodeId> MultiMasterSystem::lookup(
  const std::string& name, const std::string& topic) const
{
  return domain(name).bus().lookup(topic);
}

std::set<std::string> MultiMasterSystem::resolvable_topics(
  const std::string& name) const
{
  std::set<std::string> out;
  for (const auto& [topic, record] : domain(name).bus().registry().records())
    if (!record.publishers.empty())
      out.insert(topic);
  return out;
}

std::set<std::string> MultiMasterSystem::synced_topics(const std::string& name) const
{
  std::set<std::string> out;
  for (const auto& [topic, handle] : domain(name)._proxies)
    out.insert(topic);
  return out;
}

} // namespace fleet::topology
