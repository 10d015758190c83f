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
#include <fleet/planner/global_planner.hpp>

#include <fleet/errors.hpp>

#include <algorithm>

namespace fleet::planner {

GlobalPlanner::GlobalPlanner(
  Fabric& fabric, GridMap map, PlannerOptions options, std::string name)
: _fabric(fabric)
, _map(std::move(map))
, _options(options)
, _node{fabric.server_host(), std::move(name), ""}
{
}

void GlobalPlanner::emit(nlohmann::json event)
{
  if (!_sink)
    return;
  event["t"] = _fabric.network().now();
  _sink(event);
}

void GlobalPlanner::start()
{
  if (_started)
    return;
  _fabric.add_node(_node, _fabric.server_host());
  _map_pub = _fabric.advertise(_node, kMapTopic, "MapMsg");
  _started = true;
}

void GlobalPlanner::publish_snapshot()
{
  _fabric.publish(_map_pub, encode(_map.snapshot()));
}

void GlobalPlanner::add_robot(const std::string& robot, CellId cell)
{
  if (!_started)
    start();
  _map.require_cell(cell);
  if (_robots.contains(robot))
    throw Error(ErrorCode::NameConflict, "robot " + robot + " already tracked");

  RobotTrack& t = _robots[robot];
  t.name = robot;
  t.cell = cell;
  t.goal_pub = _fabric.advertise(_node, goal_topic(robot), "PathMsg");
  t.cancel_pub = _fabric.advertise(_node, cancel_topic(robot), "Flag");
  t.status_pub = _fabric.advertise(_node, goal_status_topic(robot), "GoalStatus");
  _fabric.subscribe(_node, pose_topic(robot), "PoseMsg",
    [this, robot](const Envelope& envelope)
    {
      if (const auto pose = decode<PoseMsg>(envelope))
        on_pose(robot, *pose);
    });
  _fabric.subscribe(_node, obstacle_topic(robot), "ObstacleReport",
    [this, robot](const Envelope& envelope)
    {
      if (const auto report = decode<ObstacleReport>(envelope))
        on_obstacle(robot, *report);
    });
}

RobotTrack& GlobalPlanner::track(const std::string& robot)
{
  const auto it = _robots.find(robot);
  if (it == _robots.end())
    throw Error(ErrorCode::InvalidArgument, "unknown robot " + robot);
  return it->second;
}

const RobotTrack& GlobalPlanner::robot(const std::string& name) const
{
  const auto it = _robots.find(name);
  if (it == _robots.end())
    throw Error(ErrorCode::InvalidArgument, "unknown robot " + name);
  return it->second;
}

std::vector<std::string> GlobalPlanner::robots() const
{
  std::vector<std::string> out;
  for (const auto& [name, t] : _robots)
    out.push_back(name);
  return out;
}

bool GlobalPlanner::all_goals_resolved() const
{
  return std::none_of(_outcomes.begin(), _outcomes.end(),
    [](const GoalOutcome& o) { return o.status == "pending"; });
}

std::vector<CellId> GlobalPlanner::remaining_path(const std::string& robot) const
{
  const RobotTrack& t = this->robot(robot);
  const auto here = std::find(t.path.begin(), t.path.end(), t.cell);
  if (here == t.path.end())
    return t.path;
  return std::vector<CellId>(here, t.path.end());
}

void GlobalPlanner::publish_path(RobotTrack& t, const std::vector<CellId>& cells)
{
  PathMsg msg{t.name, cells, _map.version(), ++t.command_seq};
  t.path = cells;
  t.path_version = msg.map_version;
  _fabric.publish(t.goal_pub, encode(msg));
  emit({{"type", "path"}, {"robot", t.name}, {"cells", cells},
    {"mapVersion", msg.map_version}, {"seq", msg.seq}});
}

void GlobalPlanner::publish_cancel(RobotTrack& t)
{
  CancelFlag flag{t.name, 1, _map.version(), ++t.command_seq};
  _fabric.publish(t.cancel_pub, encode(flag));
  emit({{"type", "cancel"}, {"robot", t.name}, {"value", 1},
    {"mapVersion", flag.map_version}, {"seq", flag.seq}});
}

void GlobalPlanner::publish_status(RobotTrack& t, const std::string& status, CellId goal)
{
  GoalStatus msg{t.name, status, goal, _map.version()};
  _fabric.publish(t.status_pub, encode(msg));
}

void GlobalPlanner::resolve(const std::string& robot, const std::string& status)
{
  for (auto it = _outcomes.rbegin(); it != _outcomes.rend(); ++it)
  {
    if (it->robot == robot && it->status == "pending")
    {
      it->status = status;
      return;
    }
  }
}

std::optional<PathMsg> GlobalPlanner::assign_goal(const std::string& robot, CellId cell)
{
  RobotTrack& t = track(robot);
  _map.require_cell(cell);
  if (_map.blocked(cell))
    throw Error(ErrorCode::InvalidGoal, "goal cell " + std::to_string(cell) + " is blocked");

  resolve(robot, "superseded");
  _outcomes.push_back({robot, cell, "pending"});
  emit({{"type", "goal_assigned"}, {"robot", robot}, {"goal", cell},
    {"start", t.cell}});

  const bool had_path = t.status == "assigned" && !t.path.empty();
  t.goal = cell;
  t.status = "assigned";
  replan(t, had_path);
  if (t.status != "assigned")
    return std::nullopt;
  return PathMsg{robot, t.path, t.path_version, t.command_seq};
}

void GlobalPlanner::replan(RobotTrack& t, bool cancel)
{
  if (cancel)
    publish_cancel(t);
  std::optional<std::vector<CellId>> cells;
  if (t.goal && !_map.blocked(*t.goal) && !_map.blocked(t.cell))
    cells = plan_path(_map, t.cell, *t.goal);
  if (!cells)
  {
    const CellId goal = t.goal.value_or(t.cell);
    if (!cancel)
      publish_cancel(t);
    t.path.clear();
    t.status = "unreachable";
    t.goal.reset();
    publish_status(t, "unreachable", goal);
    resolve(t.name, "unreachable");
    emit({{"type", "goal_unreachable"}, {"robot", t.name}, {"goal", goal},
      {"cell", t.cell}, {"mapVersion", _map.version()}});
    return;
  }
  publish_path(t, *cells);
}

void GlobalPlanner::publish_delta(const MapDelta& delta)
{
  _fabric.publish(_map_pub, encode(delta.to_msg()));
  emit({{"type", delta.blocked ? "block" : "unblock"}, {"cell", delta.cell},
    {"changed", delta.changed}, {"version", delta.version},
    {"source", std::string(to_string(delta.source))}});
}

MapDelta GlobalPlanner::block_cell(CellId cell, BlockSource source)
{
  _map.require_cell(cell);
  for (const auto& [name, t] : _robots)
  {
    if (t.cell == cell)
      throw Error(ErrorCode::OccupiedCell, "cell " + std::to_string(cell)
        + " is occupied by " + name);
  }
  const MapDelta delta = _map.block(cell, source);
  publish_delta(delta);
  if (delta.changed)
  {
    _fresh_blocks.insert(cell);
    if (!_cycle_scheduled)
    {
      _cycle_scheduled = true;
      _fabric.network().loop().schedule_after(_options.debounce, [this]()
        {
          _cycle_scheduled = false;
          on_map_change();
        });
    }
  }
  return delta;
}

MapDelta GlobalPlanner::unblock_cell(CellId cell)
{
  const MapDelta delta = _map.unblock(cell);
  if (delta.changed)
    publish_delta(delta);
  return delta;
}

std::vector<std::string> GlobalPlanner::on_map_change()
{
  std::set<CellId> fresh;
  fresh.swap(_fresh_blocks);
  ++_cycles;
  std::vector<std::string> affected;
  for (auto& [name, t] : _robots)
  {
    if (t.status != "assigned" || t.path.empty())
      continue;
    const auto rest = remaining_path(name);
    const bool hit = std::any_of(rest.begin(), rest.end(),
      [&](CellId c) { return fresh.contains(c); });
    if (hit)
      affected.push_back(name);
  }
  if (!affected.empty() || !fresh.empty())
  {
    emit({{"type", "replan"}, {"robots", affected},
      {"cells", std::vector<CellId>(fresh.begin(), fresh.end())},
      {"mapVersion", _map.version()}});
  }
  for (const auto& name : affected)
    replan(_robots.at(name), true);
  return affected;
}

void GlobalPlanner::on_pose(const std::string& robot, const PoseMsg& pose)
{
  RobotTrack& t = track(robot);
  if (!_map.in_range(pose.cell))
    return;
  t.cell = pose.cell;
  if (pose.replan_request && t.status == "assigned")
  {
    emit({{"type", "replan_request"}, {"robot", robot}, {"cell", pose.cell}});
    replan(t, false);
    return;
  }
  if (pose.status == "arrived" && t.status == "assigned" && t.goal
    && *t.goal == pose.cell)
  {
    t.status = "arrived";
    publish_status(t, "arrived", pose.cell);
    resolve(robot, "arrived");
  }
}

void GlobalPlanner::on_obstacle(const std::string& robot, const ObstacleReport& report)
{
  if (!_map.in_range(report.cell))
    return;
  emit({{"type", "obstacle_report"}, {"robot", robot}, {"cell", report.cell},
    {"known", _map.blocked(report.cell)}});
  if (_map.blocked(report.cell))
    return;
  try
  {
    block_cell(report.cell, BlockSource::RobotSensor);
  }
  catch (const Error&)
  {
  }
}

} // namespace fleet::planner
