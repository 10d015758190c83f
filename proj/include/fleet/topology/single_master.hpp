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

#include <fleet/topology/bus.hpp>

namespace fleet::topology {

/// One central master for the whole fleet: every topic is globally visible and
/// every subscriber gets its own peer link to each publisher.
class SingleMasterSystem
{
public:
  SingleMasterSystem(
    Network& network, std::string master_host,
    int master_port = kDefaultMasterPort);

  Bus& bus() { return _bus; }
  const Bus& bus() const { return _bus; }

  void register_node(const NodeId& node, const std::string& host)
  {
    _bus.register_node(node, host);
  }

  void register_node(
    const NodeId& node, const std::string& host, const std::string& master_uri)
  {
    _bus.register_node(node, host, master_uri);
  }

  TopicHandle advertise(
    const NodeId& node, const std::string& topic, const std::string& msg_type)
  {
    return _bus.advertise(node, topic, msg_type);
  }

  SubscriptionHandle subscribe(
    const NodeId& node, const std::string& topic, const std::string& msg_type,
    Bus::Callback callback)
  {
    return _bus.subscribe(node, topic, msg_type, std::move(callback));
  }

  void publish(const TopicHandle& handle, Bytes payload)
  {
    _bus.publish(handle, std::move(payload));
  }

  /// Any node sees every topic while the master lives.
  std::vector<NodeId> lookup(const NodeId& asker, const std::string& topic) const;

  std::vector<PeerLink> resolve_and_connect(const std::string& topic)
  {
    return _bus.resolve_and_connect(topic);
  }

  /// Existing links keep flowing; new registrations fail with MasterDown.
  void kill_master() { _bus.kill_master(); }
  bool master_alive() const { return _bus.alive(); }

private:
  Bus _bus;
};

} // namespace fleet::topology
