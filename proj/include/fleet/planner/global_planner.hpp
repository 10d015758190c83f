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

#include <fleet/events.hpp>
#include <fleet/planner/grid_map.hpp>
#include <fleet/topology/fabric.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fleet::planner {

using messaging::TimeNs;
using messaging::Envelope;
using topology::Fabric;
using topology::NodeId;
using topology::TopicHandle;

struct PlannerOptions
{
  /// Map changes within this window are handled by one replan cycle.
  TimeNs debounce = 50'000'000;
};

/// Planner-side view of one robot.
struct RobotTrack
{
  std::string name;
  CellId cell = 0;
  std::optional<CellId> goal;
  std::vector<CellId> path;
  std::uint64_t path_version = 0;
  std::uint64_t command_seq = 0;
  /// "idle", "assigned", "arrived", "unreachable"
  std::string status = "idle";
  TopicHandle goal_pub;
  TopicHandle cancel_pub;
  TopicHandle status_pub;
};

/// Outcome of one goal assignment.
struct GoalOutcome
{
  std::string robot;
  CellId goal = 0;
  /// "pending", "arrived", "unreachable", "superseded"
  std::string status = "pending";
};

/// Holds the shared map, plans shortest paths per robot and runs the
/// cancel-and-replan protocol when cells get blocked.
class GlobalPlanner
{
public:
  GlobalPlanner(Fabric& fabric, GridMap map, PlannerOptions options = {},
    std::string name = "global_planner");

  GlobalPlanner(const GlobalPlanner&) = delete;
  GlobalPlanner& operator=(const GlobalPlanner&) = delete;

  const NodeId& node() const { return _node; }
  const GridMap& map() const { return _map; }
  const PlannerOptions& options() const { return _options; }

  void set_event_sink(EventSink sink) { _sink = std::move(sink); }

  /// Registers the planner node and advertises "/map".
  void start();

  /// Publishes the full map on "/map".
  void publish_snapshot();

  /// Tracks a robot and wires its topics. Throws InvalidCell, NameConflict.
  void add_robot(const std::string& robot, CellId cell);

  /// Plans from the robot's current cell and publishes the path. A robot
  /// that already has a path gets CancelFlag=1 first. Returns nullopt and
  /// reports GoalUnreachable when the goal is cut off. Throws InvalidCell,
  /// InvalidGoal, InvalidArgument for an unknown robot.
  std::optional<PathMsg> assign_goal(const std::string& robot, CellId cell);

  /// Throws InvalidCell, OccupiedCell. Schedules a replan cycle when the
  /// blocked set grew.
  MapDelta block_cell(CellId cell, BlockSource source = BlockSource::Operator);
  MapDelta unblock_cell(CellId cell);

  /// Replans every robot whose remaining path touches a cell blocked since
  /// the last cycle. Returns the affected robots.
  std::vector<std::string> on_map_change();

  const RobotTrack& robot(const std::string& name) const;
  std::vector<std::string> robots() const;
  const std::vector<GoalOutcome>& outcomes() const { return _outcomes; }
  bool all_goals_resolved() const;
  std::uint64_t replan_cycles() const { return _cycles; }

  /// Remaining cells of a robot's path from its current cell onwards.
  std::vector<CellId> remaining_path(const std::string& robot) const;

private:
  RobotTrack& track(const std::string& robot);
  void emit(nlohmann::json event);
  void publish_path(RobotTrack& track, const std::vector<CellId>& cells);
  void publish_cancel(RobotTrack& track);
  void publish_status(RobotTrack& track, const std::string& status, CellId goal);
  void resolve(const std::string& robot, const std::string& status);
  void replan(RobotTrack& track, bool cancel);
  void on_pose(const std::string& robot, const PoseMsg& pose);
  void on_obstacle(const std::string& robot, const ObstacleReport& report);
  void publish_delta(const MapDelta& delta);

  Fabric& _fabric;
  GridMap _map;
  PlannerOptions _options;
  NodeId _node;
  EventSink _sink;
  TopicHandle _map_pub;
  std::map<std::string, RobotTrack> _robots;
  std::set<CellId> _fresh_blocks;
  std::vector<GoalOutcome> _outcomes;
  bool _started = false;
  bool _cycle_scheduled = false;
  std::uint64_t _cycles = 0;
};

} // namespace fleet::planner
