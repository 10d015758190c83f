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

#include <json.hpp>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace fleet::topology {

using messaging::TimeNs;

struct MultiMasterOptions
{
  TimeNs discovery_period = messaging::kNsPerSecond;
  int expiry_periods = 3;
  std::string multicast_group = "224.0.0.1";
};

/// Discovery announcement. Wire form:
/// {"domain","address","topics":[{"topic","msgType"}...],"seq"}.
struct Heartbeat
{
  std::string domain;
  std::string address;
  std::map<std::string, std::string> topics;
  std::uint64_t seq = 0;

  nlohmann::json to_json() const;
  static Heartbeat from_json(const nlohmann::json& json);
};

struct PeerInfo
{
  std::string address;
  TimeNs last_heartbeat = 0;
  std::uint64_t seq = 0;
  std::map<std::string, std::string> topics;
};

/// Matches exact names and the trailing-wildcard form "prefix/*".
bool allowlist_matches(const std::set<std::string>& allowlist, const std::string& topic);

class MultiMasterSystem;

/// Republishes every envelope of one topic under another name.
class RelayNode
{
public:
  const NodeId& node() const { return _node; }
  const std::string& source() const { return _source; }
  const std::string& destination() const { return _destination; }
  std::uint64_t forwarded() const { return _forwarded; }

private:
  friend class MultiMasterSystem;
  NodeId _node;
  std::string _source;
  std::string _destination;
  TopicHandle _output;
  std::uint64_t _forwarded = 0;
};

/// One master per domain. Domains find each other through periodic
/// heartbeats and only share the topics named in each domain's sync
/// allowlist; a per-domain sync node pulls each shared topic across the
/// boundary once and republishes it locally.
class DomainRegistry
{
public:
  DomainRegistry(Network& network, std::string name, std::string host);

  const std::string& name() const { return _name; }
  const std::string& host() const { return _host; }
  std::string address() const { return _name + "|__discovery"; }
  Bus& bus() { return *_bus; }
  const Bus& bus() const { return *_bus; }
  const std::map<std::string, PeerInfo>& known_peers() const { return _peers; }
  const std::set<std::string>& sync_allowlist() const { return _allowlist; }
  NodeId sync_node() const { return NodeId{_name, "master_sync", _name}; }

private:
  friend class MultiMasterSystem;

  struct Binding
  {
    std::string peer;
    std::string topic;
    auto operator<=>(const Binding&) const = default;
  };

  std::string _name;
  std::string _host;
  std::unique_ptr<Bus> _bus;
  std::map<std::string, PeerInfo> _peers;
  std::set<std::string> _allowlist;
  std::set<Binding> _bindings;
  std::map<std::string, TopicHandle> _proxies;
  std::map<std::string, std::string> _announced;
  std::uint64_t _seq = 0;
  bool _announcing = false;
  bool _push_pending = false;
  std::size_t _relay_count = 0;
};

class MultiMasterSystem
{
public:
  explicit MultiMasterSystem(Network& network, MultiMasterOptions options = {});

  const MultiMasterOptions& options() const { return _options; }

  DomainRegistry& add_domain(const std::string& name, const std::string& host);
  DomainRegistry& domain(const std::string& name);
  const DomainRegistry& domain(const std::string& name) const;
  std::vector<std::string> domains() const;

  /// Starts periodic announcements for every domain (first one immediately).
  void start();
  void start(const std::string& domain);

  /// The domain goes silent; peers expire it after `expiry_periods`.
  void stop_announcing(const std::string& domain);

  /// Broadcasts one heartbeat now and expires stale peers.
  void announce(const std::string& domain);

  /// Replaces the allowlist and binds whatever already matches.
  void sync_topics(const std::string& domain, std::set<std::string> allowlist);

  /// Throws InvalidRelay when source and destination coincide.
  std::shared_ptr<RelayNode> relay(
    const std::string& domain, const std::string& source,
    const std::string& destination);

  // Pub/sub entry points; the node's domain selects the registry.
  void register_node(const NodeId& node);
  TopicHandle advertise(
    const NodeId& node, const std::string& topic, const std::string& msg_type);
  SubscriptionHandle subscribe(
    const NodeId& node, const std::string& topic, const std::string& msg_type,
    Bus::Callback callback);
  void publish(const TopicHandle& handle, Bytes payload);

  /// Publishers resolvable from `domain`, local or synced.
  std::vector<NodeId> lookup(const std::string& domain, const std::string& topic) const;

  /// Topics with at least one publisher resolvable inside `domain`.
  std::set<std::string> resolvable_topics(const std::string& domain) const;

  /// Topics that reached `domain` through a sync binding.
  std::set<std::string> synced_topics(const std::string& domain) const;

private:
  void on_heartbeat(DomainRegistry& local, const Envelope& envelope);
  void refresh_sync(DomainRegistry& local);
  void bind(DomainRegistry& local, const std::string& peer,
    const std::string& topic, const std::string& msg_type);
  void expire_peers(DomainRegistry& local);
  void schedule_push(DomainRegistry& local);
  Heartbeat make_heartbeat(DomainRegistry& local);

  Network& _network;
  MultiMasterOptions _options;
  std::map<std::string, std::unique_ptr<DomainRegistry>> _domains;
};

} // namespace fleet::topology
