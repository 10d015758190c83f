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
#include <fleet/topology/cloud_config.hpp>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace fleet::topology {

/// What a behavior sees of the container it runs in.
struct BehaviorContext
{
  Bus& bus;
  NodeId node;
  std::string host;
  std::string ns;
  std::vector<std::string> args;
};

/// Built-in stand-in for a ROS executable launched inside a container.
class Behavior
{
public:
  virtual ~Behavior() = default;

  /// Registers topics. Throws on bad arguments.
  virtual void start(BehaviorContext& context) = 0;
  virtual void stop() {}
  virtual nlohmann::json stats() const { return nlohmann::json::object(); }
};

/// Maps (pkg, exe) to behavior factories.
class BehaviorRegistry
{
public:
  using Factory = std::function<std::unique_ptr<Behavior>()>;

  /// Registry preloaded with move_client, echo and echo_service.
  static BehaviorRegistry with_builtins();

  void add(const std::string& pkg, const std::string& exe, Factory factory);
  bool contains(const std::string& pkg, const std::string& exe) const;

  /// Throws UnknownBehavior.
  std::unique_ptr<Behavior> create(const std::string& pkg, const std::string& exe) const;

  std::vector<std::pair<std::string, std::string>> list() const;

private:
  std::map<std::pair<std::string, std::string>, Factory> _factories;
};

/// Splits a comma separated argument string, trimming blanks. Relative topic
/// names gain a leading slash.
std::vector<std::string> parse_topic_args(const std::string& args);

/// Follows "/<Robot>/goalNodesList" and "/cancelGoal"-style topics and turns
/// them into motion commands on "/<ns>/motion_cmd". Arguments: goal topic,
/// cancel topic, map topic.
class MoveClientBehavior : public Behavior
{
public:
  void start(BehaviorContext& context) override;
  nlohmann::json stats() const override;

  const std::string& goal_topic() const { return _goal_topic; }
  const std::string& cancel_topic() const { return _cancel_topic; }
  const std::string& map_topic() const { return _map_topic; }

private:
  Bus* _bus = nullptr;
  std::string _goal_topic;
  std::string _cancel_topic;
  std::string _map_topic;
  TopicHandle _motion;
  std::uint64_t _paths = 0;
  std::uint64_t _cancels = 0;
  std::uint64_t _maps = 0;
  std::uint64_t _malformed = 0;
};

/// Republishes every envelope from its input topic onto its output topic.
/// Arguments: input topic, output topic, optional message type (default
/// "Blob").
class EchoBehavior : public Behavior
{
public:
  void start(BehaviorContext& context) override;
  nlohmann::json stats() const override;
  std::uint64_t echoed() const { return _echoed; }

private:
  Bus* _bus = nullptr;
  TopicHandle _output;
  std::uint64_t _echoed = 0;
};

} // namespace fleet::topology
