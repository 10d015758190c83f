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
#include <fleet/topology/registry.hpp>

namespace fleet::topology {

void MasterRegistry::require_alive() const
{
  if (!_alive)
    throw Error(ErrorCode::MasterDown, "master is not running");
}

void MasterRegistry::require_registered(const NodeId& node) const
{
  const auto it = _nodes.find(node.graph_name());
  if (it == _nodes.end() || it->second != node)
    throw Error(ErrorCode::InvalidArgument,
      "node " + node.qualified() + " is not registered");
}

void MasterRegistry::register_node(const NodeId& node)
{
  require_alive();
  const auto [it, inserted] = _nodes.emplace(node.graph_name(), node);
  if (!inserted && it->second != node)
    throw Error(ErrorCode::NameConflict, node.graph_name()
      + " already registered by " + it->second.qualified());
}

bool MasterRegistry::registered(const NodeId& node) const
{
  const auto it = _nodes.find(node.graph_name());
  return it != _nodes.end() && it->second == node;
}

void MasterRegistry::remove_node(const NodeId& node)
{
  if (!_alive)
    return;
  const auto it = _nodes.find(node.graph_name());
  if (it == _nodes.end() || it->second != node)
    return;
  _nodes.erase(it);
  for (auto& [topic, record] : _topics)
  {
    record.publishers.erase(node);
    record.subscribers.erase(node);
  }
}

TopicRecord& MasterRegistry::record_for(
  const std::string& topic, const std::string& msg_type)
{
  messaging::require_valid_topic(topic);
  auto& record = _topics[topic];
  if (record.msg_type.empty())
    record.msg_type = msg_type;
  else if (record.msg_type != msg_type)
    throw Error(ErrorCode::TypeMismatch, topic + " carries " + record.msg_type
      + ", not " + msg_type);
  return record;
}

void MasterRegistry::add_publisher(
  const NodeId& node, const std::string& topic, const std::string& msg_type)
{
  require_alive();
  require_registered(node);
  record_for(topic, msg_type).publishers.insert(node);
}

void MasterRegistry::add_subscriber(
  const NodeId& node, const std::string& topic, const std::string& msg_type)
{
  require_alive();
  require_registered(node);
  record_for(topic, msg_type).subscribers.insert(node);
}

void MasterRegistry::remove_publisher(const NodeId& node, const std::string& topic)
{
  if (!_alive)
    return;
  const auto it = _topics.find(topic);
  if (it != _topics.end())
    it->second.publishers.erase(node);
}

void MasterRegistry::remove_subscriber(const NodeId& node, const std::string& topic)
{
  if (!_alive)
    return;
  const auto it = _topics.find(topic);
  if (it != _topics.end())
    it->second.subscribers.erase(node);
}

std::vector<NodeId> MasterRegistry::publishers(const std::string& topic) const
{
  const auto it = _topics.find(topic);
  if (it == _topics.end())
    return {};
  return {it->second.publishers.begin(), it->second.publishers.end()};
}

std::vector<NodeId> MasterRegistry::subscribers(const std::string& topic) const
{
  const auto it = _topics.find(topic);
  if (it == _topics.end())
    return {};
  return {it->second.subscribers.begin(), it->second.subscribers.end()};
}

std::optional<std::string> MasterRegistry::msg_type(const std::string& topic) const
{
  const auto it = _topics.find(topic);
  if (it == _topics.end())
    return std::nullopt;
  return it->second.msg_type;
}

std::vector<std::string> MasterRegistry::topics() const
{
  std::vector<std::string> out;
  for (const auto& [topic, record] : _topics)
    out.push_back(topic);
  return out;
}

std::vector<NodeId> MasterRegistry::nodes() const
{
  std::vector<NodeId> out;
  for (const auto& [name, node] : _nodes)
    out.push_back(node);
  return out;
}

} // namespace fleet::topology
