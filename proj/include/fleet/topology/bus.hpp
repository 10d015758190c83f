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

#include <fleet/messaging/network.hpp>
#include <fleet/topology/registry.hpp>

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace fleet::topology {

using messaging::Bytes;
using messaging::Envelope;
using messaging::Network;

constexpr int kDefaultMasterPort = 11311;

/// A direct publisher-to-subscriber stream set up by the master.
struct PeerLink
{
  NodeId publisher;
  NodeId subscriber;
  std::string topic;

  auto operator<=>(const PeerLink&) const = default;
};

struct PublisherState
{
  NodeId node;
  std::string topic;
  std::string msg_type;
  std::uint64_t next_id = 1;
  bool active = true;
};

class TopicHandle
{
public:
  TopicHandle() = default;

  const NodeId& node() const { return _state->node; }
  const std::string& topic() const { return _state->topic; }
  const std::string& msg_type() const { return _state->msg_type; }
  bool valid() const { return _state && _state->active; }

  /// Handles to the same advertisement compare equal.
  bool operator==(const TopicHandle& other) const
  {
    return _state == other._state;
  }

private:
  friend class Bus;
  explicit TopicHandle(std::shared_ptr<PublisherState> state)
  : _state(std::move(state))
  {
  }

  std::shared_ptr<PublisherState> _state;
};

struct SubscriptionHandle
{
  NodeId node;
  std::string topic;
  std::string msg_type;
};

/// One master plus the peer mesh it brokers. Registration and resolution go
/// through the master (and cost control traffic to the master's host); data
/// then flows over direct links that outlive the master.
class Bus
{
public:
  using Callback = std::function<void(const Envelope&)>;

  Bus(
    Network& network,
    std::string name,
    std::string master_host,
    int master_port = kDefaultMasterPort);

  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  const std::string& name() const { return _name; }
  const std::string& master_host() const { return _master_host; }
  int master_port() const { return _master_port; }
  std::string master_uri() const;
  Network& network() { return _network; }

  /// Network address of a node's inbox.
  static std::string address(const NodeId& node) { return node.qualified(); }

  void register_node(const NodeId& node, const std::string& host);

  /// Variant checking the caller's idea of the master URI; a mismatch means
  /// the master is unreachable from the node.
  void register_node(
    const NodeId& node, const std::string& host, const std::string& master_uri);

  bool registered(const NodeId& node) const { return _registry.registered(node); }

  /// Idempotent per (node, topic): repeated calls return the same handle.
  TopicHandle advertise(
    const NodeId& node, const std::string& topic, const std::string& msg_type);

  SubscriptionHandle subscribe(
    const NodeId& node, const std::string& topic, const std::string& msg_type,
    Callback callback);

  void unadvertise(const TopicHandle& handle);
  void unsubscribe(const SubscriptionHandle& handle);
  void remove_node(const NodeId& node);

  void publish(const TopicHandle& handle, std::shared_ptr<const Bytes> payload);
  void publish(const TopicHandle& handle, Bytes payload);
  void publish(const TopicHandle& handle, std::string_view text);

  /// Publishers currently visible for a topic. Throws MasterDown.
  std::vector<NodeId> lookup(const std::string& topic) const;

  /// Every link for the topic, creating any that are missing.
  std::vector<PeerLink> resolve_and_connect(const std::string& topic);

  std::vector<PeerLink> links() const;
  std::vector<PeerLink> links(const std::string& topic) const;

  void kill_master();
  bool alive() const { return _registry.alive(); }
  const MasterRegistry& registry() const { return _registry; }

  std::uint64_t publish_count(const std::string& topic) const;
  const std::map<std::string, std::uint64_t>& publish_counts() const
  {
    return _publish_counts;
  }

  /// Invoked after any advertisement change.
  void set_on_change(std::function<void()> fn) { _on_change = std::move(fn); }

private:
  void control(const NodeId& from, const std::string& verb, nlohmann::json body);
  void notify(const NodeId& to, const std::string& verb, nlohmann::json body);
  void connect(const NodeId& publisher, const NodeId& subscriber,
    const std::string& topic);
  void drop_links(const NodeId& node, const std::string* topic);

  Network& _network;
  std::string _name;
  std::string _master_host;
  int _master_port;
  std::string _master_address;
  MasterRegistry _registry;
  std::set<PeerLink> _links;
  std::map<std::pair<NodeId, std::string>, std::shared_ptr<PublisherState>>
  _publishers;
  std::map<std::string, std::uint64_t> _publish_counts;
  std::function<void()> _on_change;
};

} // namespace fleet::topology
