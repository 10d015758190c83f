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

#include <deque>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace fleet::robot {

using messaging::TimeNs;
using planner::GridMap;
using messaging::Envelope;
using topology::Fabric;
using topology::NodeId;
using topology::TopicHandle;

enum class RobotStatus { Idle, Moving, Halted, Arrived };

std::string_view to_string(RobotStatus status);

struct RobotParams
{
  std::string name;
  CellId start = 0;
  double speed = 1.0;          // cells per second
  int sensor_range = 2;        // cells of lookahead along the path
  double pose_rate = 5.0;      // Hz
  double noise_sigma = 0.0;    // cell units
  double tick_period = 0.05;   // seconds
  std::uint64_t seed = 1;

  /// Throws InvalidArgument.
  void validate() const;
};

struct Pose
{
  double x = 0.0;   // column, cell units
  double y = 0.0;   // row, cell units
  double theta = 0.0;
};

/// Kinematic robot moving center to center along grid edges. Cancelling or
/// finding the next cell blocked sends it back to the center of the last
/// cell it reached, so it never enters a cell blocked in its map.
class RobotSim
{
public:
  RobotSim(Fabric& fabric, RobotParams params, const GridMap& map);

  RobotSim(const RobotSim&) = delete;
  RobotSim& operator=(const RobotSim&) = delete;

  const RobotParams& params() const { return _params; }
  const std::string& name() const { return _params.name; }
  const NodeId& node() const { return _node; }
  void set_event_sink(EventSink sink) { _sink = std::move(sink); }

  /// Registers the robot node on its own host and wires its topics.
  void connect();
  /// connect(), then starts the motion and pose timers.
  void start();

  /// Advances motion by dt seconds and runs sensing. Throws InvalidArgument
  /// for dt <= 0.
  void tick(double dt);

  /// Loads a path. Paths planned against an older map version than the last
  /// applied path are ignored. Throws PathRejected when the path does not
  /// start at the current cell; a replan request goes out first.
  void on_path(const PathMsg& msg, bool cancel_seen);

  /// Drops the queue and halts at the last reached center.
  void on_cancel(const CancelFlag& flag);

  void on_map(const MapMsg& msg);

  /// Blocked cells among the next sensor_range cells of the queue that were
  /// not yet reported at the current map version. Reports are published.
  std::vector<ObstacleReport> sense();

  /// Obstacle only this robot can see until it reports it.
  void add_local_obstacle(CellId cell);

  const Pose& pose() const { return _pose; }
  CellId current_cell() const { return _cell; }
  const std::deque<CellId>& queue() const { return _queue; }
  const std::vector<CellId>& path() const { return _path; }
  RobotStatus status() const { return _status; }
  const GridMap& map() const { return _map; }
  std::uint64_t applied_version() const { return _applied_version; }
  bool blocked(CellId cell) const;

  /// Builds the pose message, with noise applied to x and y.
  PoseMsg make_pose(bool replan_request = false);

  /// Publishes a pose now.
  void publish_pose(bool replan_request = false);

  std::uint64_t cells_entered() const { return _cells_entered; }

private:
  void emit(nlohmann::json event);
  void set_status(RobotStatus status, bool force = false);
  Pose center(CellId cell) const;
  CellId displaced_towards() const;

  Fabric& _fabric;
  RobotParams _params;
  NodeId _node;
  GridMap _map;
  EventSink _sink;
  std::mt19937_64 _rng;
  std::set<CellId> _local_obstacles;
  std::set<std::pair<CellId, std::uint64_t>> _reported;

  Pose _pose;
  CellId _cell;
  std::deque<CellId> _queue;
  std::vector<CellId> _path;
  RobotStatus _status = RobotStatus::Idle;
  std::uint64_t _applied_version = 0;
  std::uint64_t _last_seq = 0;
  bool _has_path = false;
  bool _cancel_seen = false;
  std::uint64_t _cells_entered = 0;

  TopicHandle _pose_pub;
  TopicHandle _obstacle_pub;
  bool _started = false;
  bool _running = false;
};

} // namespace fleet::robot
