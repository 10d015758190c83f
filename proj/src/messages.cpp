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
#include <fleet/messages.hpp>

namespace fleet {

nlohmann::json PathMsg::to_json() const
{
  nlohmann::json out = {{"robot", robot}, {"cells", cells}, {"mapVersion", map_version}};
  if (seq != 0)
    out["seq"] = seq;
  return out;
}

PathMsg PathMsg::from_json(const nlohmann::json& json)
{
  PathMsg msg;
  msg.robot = json.at("robot").get<std::string>();
  msg.cells = json.at("cells").get<std::vector<CellId>>();
  msg.map_version = json.value("mapVersion", std::uint64_t{0});
  msg.seq = json.value("seq", std::uint64_t{0});
  return msg;
}

nlohmann::json CancelFlag::to_json() const
{
  nlohmann::json out = {{"robot", robot}, {"value", value}, {"mapVersion", map_version}};
  if (seq != 0)
    out["seq"] = seq;
  return out;
}

CancelFlag CancelFlag::from_json(const nlohmann::json& json)
{
  CancelFlag flag;
  if (json.is_number_integer())
  {
    flag.value = json.get<int>();
  }
  else
  {
    flag.robot = json.value("robot", std::string());
    flag.value = json.at("value").get<int>();
    flag.map_version = json.value("mapVersion", std::uint64_t{0});
    flag.seq = json.value("seq", std::uint64_t{0});
  }
  if (flag.value != 0 && flag.value != 1)
    throw std::invalid_argument("cancel flag must be 0 or 1");
  return flag;
}

nlohmann::json PoseMsg::to_json() const
{
  nlohmann::json json{{"robot", robot}, {"x", x}, {"y", y}, {"theta", theta},
    {"cell", cell}, {"status", status}, {"mapVersion", map_version}};
  if (replan_request)
    json["replanRequest"] = true;
  return json;
}

PoseMsg PoseMsg::from_json(const nlohmann::json& json)
{
  PoseMsg msg;
  msg.robot = json.at("robot").get<std::string>();
  msg.x = json.at("x").get<double>();
  msg.y = json.at("y").get<double>();
  msg.theta = json.value("theta", 0.0);
  msg.cell = json.at("cell").get<CellId>();
  msg.status = json.value("status", std::string());
  msg.map_version = json.value("mapVersion", std::uint64_t{0});
  msg.replan_request = json.value("replanRequest", false);
  return msg;
}

nlohmann::json ObstacleReport::to_json() const
{
  return {{"robot", robot}, {"cell", cell}, {"mapVersion", map_version}};
}

ObstacleReport ObstacleReport::from_json(const nlohmann::json& json)
{
  ObstacleReport report;
  report.robot = json.at("robot").get<std::string>();
  report.cell = json.at("cell").get<CellId>();
  report.map_version = json.value("mapVersion", std::uint64_t{0});
  return report;
}

nlohmann::json GoalStatus::to_json() const
{
  return {{"robot", robot}, {"status", status}, {"goal", goal},
    {"mapVersion", map_version}};
}

GoalStatus GoalStatus::from_json(const nlohmann::json& json)
{
  GoalStatus status;
  status.robot = json.at("robot").get<std::string>();
  status.status = json.at("status").get<std::string>();
  status.goal = json.value("goal", CellId{0});
  status.map_version = json.value("mapVersion", std::uint64_t{0});
  return status;
}

nlohmann::json MapMsg::to_json() const
{
  if (kind == "delta")
  {
    return {{"kind", kind}, {"cell", cell}, {"blocked", cell_blocked},
      {"source", source}, {"version", version}};
  }
  return {{"kind", kind}, {"width", width}, {"height", height},
    {"blocked", blocked}, {"version", version}};
}

MapMsg MapMsg::from_json(const nlohmann::json& json)
{
  MapMsg msg;
  msg.kind = json.value("kind", std::string("snapshot"));
  msg.version = json.at("version").get<std::uint64_t>();
  if (msg.kind == "delta")
  {
    msg.cell = json.at("cell").get<CellId>();
    msg.cell_blocked = json.at("blocked").get<bool>();
    msg.source = json.value("source", std::string());
  }
  else
  {
    msg.width = json.at("width").get<int>();
    msg.height = json.at("height").get<int>();
    msg.blocked = json.at("blocked").get<std::vector<CellId>>();
  }
  return msg;
}

std::string goal_topic(const std::string& robot)
{
  return "/" + robot + "/goalNodesList";
}

std::string cancel_topic(const std::string& robot)
{
  return "/" + robot + "/cancelGoal";
}

std::string pose_topic(const std::string& robot)
{
  return "/" + robot + "/amcl_pose";
}

std::string obstacle_topic(const std::string& robot)
{
  return "/" + robot + "/obstacle";
}

std::string goal_status_topic(const std::string& robot)
{
  return "/" + robot + "/goalStatus";
}

std::string scan_topic(const std::string& robot)
{
  return "/" + robot + "/scan";
}

} // namespace fleet
