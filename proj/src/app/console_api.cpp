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
#include <fleet/app/console_api.hpp>

#include <fleet/errors.hpp>

namespace fleet::app {

using nlohmann::json;

std::vector<json> console_messages(const json& event)
{
  std::vector<json> out;
  const std::string type = event.value("type", "");
  if ((type == "block" || type == "unblock") && event.value("changed", false))
  {
    out.push_back({{"type", "map_delta"}, {"cell", event.at("cell")},
      {"blocked", type == "block"}, {"version", event.at("version")},
      {"source", event.value("source", "")}});
  }
  else if (type == "path")
  {
    out.push_back({{"type", "path"}, {"robot", event.at("robot")},
      {"cells", event.at("cells")}, {"mapVersion", event.value("mapVersion", 0)}});
  }
  out.push_back({{"type", "event"}, {"event", event}});
  return out;
}

json console_snapshot(SimRunner& runner)
{
  const auto& map = runner.planner().map();
  return {{"type", "map_snapshot"}, {"width", map.width()}, {"height", map.height()},
    {"blocked", map.blocked_cells()}, {"version", map.version()}};
}

std::vector<json> console_poses(SimRunner& runner)
{
  std::vector<json> out;
  for (const auto& robot : runner.robots())
  {
    const auto pose = robot->pose();
    out.push_back({{"type", "pose"}, {"robot", robot->name()}, {"x", pose.x},
      {"y", pose.y}, {"theta", pose.theta}, {"cell", robot->current_cell()},
      {"status", std::string(robot::to_string(robot->status()))}});
  }
  return out;
}

json handle_console_command(SimRunner& runner, const json& command)
{
  json reply;
  std::string type;
  try
  {
    if (!command.is_object())
      throw Error(ErrorCode::InvalidArgument, "command must be a JSON object");
    type = command.value("type", "");
    if (!command.contains("cell") || !command.at("cell").is_number_integer())
      throw Error(ErrorCode::InvalidArgument, "command needs an integer 'cell'");
    const CellId cell = command.at("cell").get<CellId>();
    if (type == "block_cell")
    {
      const auto delta = runner.block_cell(cell);
      reply = {{"type", "ack"}, {"version", delta.version}, {"changed", delta.changed}};
    }
    else if (type == "unblock_cell")
    {
      const auto delta = runner.unblock_cell(cell);
      reply = {{"type", "ack"}, {"version", delta.version}, {"changed", delta.changed}};
    }
    else if (type == "assign_goal")
    {
      if (!command.contains("robot") || !command.at("robot").is_string())
        throw Error(ErrorCode::InvalidArgument, "assign_goal needs a 'robot'");
      const auto path = runner.assign_goal(command.at("robot").get<std::string>(), cell);
      reply = {{"type", "ack"}, {"reachable", path.has_value()}};
      if (path)
        reply["cells"] = path->cells;
    }
    else
    {
      throw Error(ErrorCode::InvalidArgument, "unknown command '" + type + "'");
    }
  }
  catch (const Error& e)
  {
    reply = {{"type", "error"}, {"error", std::string(to_string(e.code()))},
      {"detail", e.detail()}};
  }
  reply["command"] = type;
  if (command.is_object() && command.contains("id"))
    reply["id"] = command.at("id");
  return reply;
}

} // namespace fleet::app
