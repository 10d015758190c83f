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

#include <fleet/messaging/envelope.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fleet::topology {

using messaging::NodeId;

struct TopicRecord
{
  std::string msg_type;
  std::set<NodeId> publishers;
  std::set<NodeId> subscribers;
};

/// Name-resolution state of one master. Node names are unique per graph
/// name ("/ns/name"), so two machines running an un-namespaced "/amcl" under
/// the same master collide.
class MasterRegistry
{
public:
  /// Throws MasterDown when dead, NameConflict on a clashing graph name.
  /// Re-registering the identical node is accepted.
  void register_node(const NodeId& node);
  bool registered(const NodeId& node) const;

  /// Removes the node and every advertisement or subscription it holds.
  void remove_node(const NodeId& node);

  void add_publisher(
    const NodeId& node, const std::string& topic, const std::string& msg_type);
  void add_subscriber(
    const NodeId& node, const std::string& topic, const std::string& msg_type);
  void remove_publisher(const NodeId& node, const std::string& topic);
  void remove_subscriber(const NodeId& node, const std::string& topic);

  std::vector<NodeId> publishers(const std::string& topic) const;
  std::vector<NodeId> subscribers(const std::string& topic) const;
  std::optional<std::string> msg_type(const std::string& topic) const;
  std::vector<std::string> topics() const;
  std::vector<NodeId> nodes() const;
  const std::map<std::string, TopicRecord>& records() const { return _topics; }

  bool alive() const { return _alive; }

  /// Freezes the maps. Calling it again is a no-op.
  void kill() { _alive = false; }

private:
  void require_alive() const;
  void require_registered(const NodeId& node) const;
  TopicRecord& record_for(const std::string& topic, const std::string& msg_type);

  std::map<std::string, NodeId> _nodes;
  std::map<std::string, TopicRecord> _topics;
  bool _alive = true;
};

} // namespace fleet::topology
