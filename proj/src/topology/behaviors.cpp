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
#include <fleet/messages.hpp>
#include <fleet/topology/behaviors.hpp>

#include <algorithm>

namespace fleet::topology {

BehaviorRegistry BehaviorRegistry::with_builtins()
{
  BehaviorRegistry registry;
  const auto move_client = [] { return std::make_unique<MoveClientBehavior>(); };
  const auto echo = [] { return std::make_unique<EchoBehavior>(); };
  registry.add("move_client", "move_client_pthread", move_client);
  registry.add("move_client", "move_client", move_client);
  registry.add("echo", "echo", echo);
  registry.add("echo", "echo_service", echo);
  return registry;
}

void BehaviorRegistry::add(
  const std::string& pkg, const std::string& exe, Factory factory)
{
  _factories[{pkg, exe}] = std::move(factory);
}

bool BehaviorRegistry::contains(const std::string& pkg, const std::string& exe) const
{
  return _factories.contains({pkg, exe});
}

std::unique_ptr<Behavior> BehaviorRegistry::create(
  const std::string& pkg, const std::string& exe) const
{
  const auto it = _factories.find({pkg, exe});
  if (it == _factories.end())
    throw Error(ErrorCode::UnknownBehavior, "no executable " + exe
      + " in package " + pkg);
  return it->second();
}

std::vector<std::pair<std::string, std::string>> BehaviorRegistry::list() const
{
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, factory] : _factories)
    out.push_back(key);
  return out;
}

std::vector<std::string> parse_topic_args(const std::string& args)
{
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (begin <= args.size())
  {
    const auto comma = std::min(args.find(',', begin), args.size());
    std::string item = args.substr(begin, comma - begin);
    const auto first = item.find_first_not_of(" \t\r\n");
    const auto last = item.find_last_not_of(" \t\r\n");
    item = first == std::string::npos ? "" : item.substr(first, last - first + 1);
    if (!item.empty())
    {
      if (item.front() != '/')
        item.insert(item.begin(), '/');
      out.push_back(item);
    }
    begin = comma + 1;
  }
  return out;
}

//==============================================================================
void MoveClientBehavior::start(BehaviorContext& context)
{
  if (context.args.size() < 2)
    throw Error(ErrorCode::InvalidArgument,
      "move_client needs goal and cancel topics, got "
      + std::to_string(context.args.size()) + " arguments");
  _bus = &context.bus;
  _goal_topic = context.args[0];
  _cancel_topic = context.args[1];
  if (context.args.size() > 2)
    _map_topic = context.args[2];
  for (const auto& topic : context.args)
    messaging::require_valid_topic(topic);

  const std::string motion_topic = context.ns.empty()
    ? "/motion_cmd" : "/" + context.ns + "/motion_cmd";
  _motion = _bus->advertise(context.node, motion_topic, "MotionCmd");

  _bus->subscribe(context.node, _goal_topic, "PathMsg",
    [this](const Envelope& envelope)
    {
      const auto path = decode<PathMsg>(envelope);
      if (!path)
      {
        ++_malformed;
        return;
      }
      ++_paths;
      nlohmann::json cmd{{"cmd", "follow"}, {"robot", path->robot},
        {"cells", path->cells}, {"mapVersion", path->map_version}};
      _bus->publish(_motion, cmd.dump());
    });

  _bus->subscribe(context.node, _cancel_topic, "Flag",
    [this](const Envelope& envelope)
    {
      const auto flag = decode<CancelFlag>(envelope);
      if (!flag)
      {
        ++_malformed;
        return;
      }
      if (flag->value != 1)
        return;
      ++_cancels;
      nlohmann::json cmd{{"cmd", "cancel"}, {"robot", flag->robot},
        {"mapVersion", flag->map_version}};
      _bus->publish(_motion, cmd.dump());
    });

  if (!_map_topic.empty())
  {
    _bus->subscribe(context.node, _map_topic, "MapMsg",
      [this](const Envelope&) { ++_maps; });
  }
}

nlohmann::json MoveClientBehavior::stats() const
{
  return {{"paths", _paths}, {"cancels", _cancels}, {"maps", _maps},
    {"malformed", _malformed}};
}

//==============================================================================
void EchoBehavior::start(BehaviorContext& context)
{
  if (context.args.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "echo needs input and output topics");
  _bus = &context.bus;
  std::string msg_type = "Blob";
  if (context.args.size() > 2)
    msg_type = context.args[2].substr(1);

  if (context.args[0] == context.args[1])
    throw Error(ErrorCode::InvalidArgument, "echo input equals output");

  _output = _bus->advertise(context.node, context.args[1], msg_type);
  _bus->subscribe(context.node, context.args[0], msg_type,
    [this](const Envelope& envelope)
    {
      ++_echoed;
      _bus->publish(_output, envelope.payload);
    });
}

nlohmann::json EchoBehavior::stats() const
{
  return {{"echoed", _echoed}};
}

} // namespace fleet::topology
