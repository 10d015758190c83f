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
#include <fleet/robot/robot_sim.hpp>

#include <fleet/errors.hpp>

#include <algorithm>
#include <cmath>

namespace fleet::robot {

namespace {

constexpr double kEps = 1e-9;

} // anonymous namespace

std::string_view to_string(RobotStatus status)
{
  switch (status)
  {
    case RobotStatus::Idle: return "idle";
    case RobotStatus::Moving: return "moving";
    case RobotStatus::Halted: return "halted";
    case RobotStatus::Arrived: return "arrived";
  }
  return "idle";
}

void RobotParams::validate() const
{
  if (name.empty())
    throw Error(ErrorCode::InvalidArgument, "robot name is empty");
  if (!(speed > 0.0))
    throw Error(ErrorCode::InvalidArgument, name + ": speed must be > 0");
  if (sensor_range < 1)
    throw Error(ErrorCode::InvalidArgument, name + ": sensor_range must be >= 1");
  if (!(pose_rate > 0.0))
    throw Error(ErrorCode::InvalidArgument, name + ": pose_rate must be > 0");
  if (noise_sigma < 0.0)
    throw Error(ErrorCode::InvalidArgument, name + ": noise sigma must be >= 0");
  if (!(tick_period > 0.0))
    throw Error(ErrorCode::InvalidArgument, name + ": tick period must be > 0");
}

RobotSim::RobotSim(Fabric& fabric, RobotParams params, const GridMap& map)
: _fabric(fabric)
, _params(std::move(params))
, _node{_params.name, "amr", _params.name}
, _map(map)
, _rng(_params.seed)
, _cell(_params.start)
{
  _params.validate();
  _map.require_cell(_cell);
  _pose = center(_cell);
}

void RobotSim::emit(nlohmann::json event)
{
  if (!_sink)
    return;
  event["t"] = _fabric.network().now();
  event["robot"] = _params.name;
  _sink(event);
}

Pose RobotSim::center(CellId cell) const
{
  return Pose{static_cast<double>(_map.col(cell)), static_cast<double>(_map.row(cell)),
    _pose.theta};
}

bool RobotSim::blocked(CellId cell) const
{
  return _map.blocked(cell) || _local_obstacles.contains(cell);
}

void RobotSim::add_local_obstacle(CellId cell)
{
  _map.require_cell(cell);
  _local_obstacles.insert(cell);
}

void RobotSim::set_status(RobotStatus status, bool force)
{
  if (_status == status && !force)
    return;
  _status = status;
  emit({{"type", "status"}, {"status", std::string(to_string(status))},
    {"cell", _cell}});
  if (_started && (status == RobotStatus::Arrived || status == RobotStatus::Halted))
    publish_pose();
}

void RobotSim::connect()
{
  if (_started)
    return;
  const std::string& robot = _params.name;
  _fabric.add_node(_node, robot);
  _pose_pub = _fabric.advertise(_node, pose_topic(robot), "PoseMsg");
  _obstacle_pub = _fabric.advertise(_node, obstacle_topic(robot), "ObstacleReport");
  _fabric.subscribe(_node, goal_topic(robot), "PathMsg",
    [this](const Envelope& envelope)
    {
      const auto msg = decode<PathMsg>(envelope);
      if (!msg)
        return;
      try
      {
        on_path(*msg, _cancel_seen);
      }
      catch (const Error&)
      {
      }
    });
  _fabric.subscribe(_node, cancel_topic(robot), "Flag",
    [this](const Envelope& envelope)
    {
      if (const auto flag = decode<CancelFlag>(envelope))
        on_cancel(*flag);
    });
  _fabric.subscribe(_node, kMapTopic, "MapMsg",
    [this](const Envelope& envelope)
    {
      if (const auto msg = decode<MapMsg>(envelope))
        on_map(*msg);
    });
  _started = true;
}

void RobotSim::start()
{
  connect();
  if (_running)
    return;
  _running = true;

  auto& loop = _fabric.network().loop();
  const TimeNs tick = messaging::seconds_to_ns(_params.tick_period);
  loop.schedule_every(loop.now() + tick, tick, [this]()
    {
      this->tick(_params.tick_period);
      return true;
    });
  const TimeNs pose_period = messaging::seconds_to_ns(1.0 / _params.pose_rate);
  loop.schedule_every(loop.now(), pose_period, [this]()
    {
      publish_pose();
      return true;
    });
  emit({{"type", "spawn"}, {"cell", _cell}});
}

CellId RobotSim::displaced_towards() const
{
  const Pose c = center(_cell);
  const double dx = _pose.x - c.x;
  const double dy = _pose.y - c.y;
  const int row = _map.row(_cell);
  const int col = _map.col(_cell);
  if (std::abs(dx) > kEps)
    return _map.cell_at(row, col + (dx > 0 ? 1 : -1));
  return _map.cell_at(row + (dy > 0 ? 1 : -1), col);
}

void RobotSim::tick(double dt)
{
  if (!(dt > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tick dt must be > 0");

  double budget = _params.speed * dt;
  while (budget > kEps)
  {
    const Pose here = center(_cell);
    const bool at_center =
      std::abs(_pose.x - here.x) + std::abs(_pose.y - here.y) < kEps;
    CellId target = _cell;
    if (at_center)
    {
      _pose.x = here.x;
      _pose.y = here.y;
      if (_queue.empty())
        break;
      const CellId head = _queue.front();
      if (blocked(head))
      {
        set_status(RobotStatus::Halted);
        break;
      }
      target = head;
      set_status(RobotStatus::Moving);
    }
    else
    {
      const CellId edge = displaced_towards();
      if (!_queue.empty() && _queue.front() == edge && !blocked(edge))
        target = edge;
    }

    const Pose goal = center(target);
    const double dx = goal.x - _pose.x;
    const double dy = goal.y - _pose.y;
    const double dist = std::abs(dx) + std::abs(dy);
    if (dist > kEps)
      _pose.theta = std::atan2(dy, dx);
    if (budget + kEps >= dist)
    {
      _pose.x = goal.x;
      _pose.y = goal.y;
      budget -= dist;
      if (target != _cell)
      {
        _cell = target;
        _queue.pop_front();
        ++_cells_entered;
        emit({{"type", "cell"}, {"cell", _cell}});
        if (_queue.empty() && !_path.empty() && _path.back() == _cell)
          set_status(RobotStatus::Arrived);
      }
    }
    else
    {
      _pose.x += dist > 0 ? dx / dist * budget : 0.0;
      _pose.y += dist > 0 ? dy / dist * budget : 0.0;
      budget = 0.0;
    }
  }
  sense();
}

void RobotSim::on_path(const PathMsg& msg, bool cancel_seen)
{
  if (!msg.robot.empty() && msg.robot != _params.name)
    return;
  if ((_has_path && msg.map_version < _applied_version) || (msg.seq != 0 && msg.seq < _last_seq))
  {
    emit({{"type", "path_ignored"}, {"mapVersion", msg.map_version},
      {"applied", _applied_version}});
    return;
  }
  if (cancel_seen)
    _queue.clear();

  bool ok = !msg.cells.empty() && msg.cells.front() == _cell;
  for (std::size_t i = 1; ok && i < msg.cells.size(); ++i)
    ok = _map.adjacent(msg.cells[i - 1], msg.cells[i]);
  if (!ok)
  {
    emit({{"type", "path_rejected"}, {"cells", msg.cells}, {"cell", _cell},
      {"mapVersion", msg.map_version}});
    if (_started)
      publish_pose(true);
    throw Error(ErrorCode::PathRejected, _params.name + " is at cell "
      + std::to_string(_cell) + " but the path starts elsewhere");
  }

  if (msg.seq != 0)
    _last_seq = msg.seq;
  _path = msg.cells;
  _queue.assign(msg.cells.begin() + 1, msg.cells.end());
  _applied_version = msg.map_version;
  _has_path = true;
  _cancel_seen = false;
  emit({{"type", "path_received"}, {"cells", msg.cells},
    {"mapVersion", msg.map_version}});
  if (_queue.empty())
    set_status(RobotStatus::Arrived, true);
  else
    set_status(RobotStatus::Moving);
}

void RobotSim::on_cancel(const CancelFlag& flag)
{
  if (flag.value != 1)
    return;
  if (flag.seq != 0 && flag.seq < _last_seq)
  {
    emit({{"type", "cancel_ignored"}, {"seq", flag.seq}, {"applied", _last_seq}});
    return;
  }
  if (flag.seq != 0)
    _last_seq = flag.seq;
  _queue.clear();
  _cancel_seen = true;
  emit({{"type", "cancel_received"}, {"mapVersion", flag.map_version},
    {"cell", _cell}});
  set_status(RobotStatus::Halted);
}

void RobotSim::on_map(const MapMsg& msg)
{
  if (msg.kind == "delta" && msg.version <= _map.version())
    return;
  _map.apply(msg);
}

std::vector<ObstacleReport> RobotSim::sense()
{
  std::vector<ObstacleReport> out;
  const std::size_t n = std::min<std::size_t>(
    static_cast<std::size_t>(_params.sensor_range), _queue.size());
  for (std::size_t i = 0; i < n; ++i)
  {
    const CellId cell = _queue[i];
    if (!blocked(cell))
      continue;
    if (!_reported.insert({cell, _map.version()}).second)
      continue;
    ObstacleReport report{_params.name, cell, _map.version()};
    out.push_back(report);
    emit({{"type", "obstacle_sensed"}, {"cell", cell},
      {"mapVersion", report.map_version}});
    if (_started)
      _fabric.publish(_obstacle_pub, encode(report));
  }
  return out;
}

PoseMsg RobotSim::make_pose(bool replan_request)
{
  PoseMsg msg;
  msg.robot = _params.name;
  msg.x = _pose.x;
  msg.y = _pose.y;
  if (_params.noise_sigma > 0.0)
  {
    std::normal_distribution<double> noise(0.0, _params.noise_sigma);
    msg.x += noise(_rng);
    msg.y += noise(_rng);
  }
  msg.theta = _pose.theta;
  msg.cell = _cell;
  msg.status = std::string(to_string(_status));
  msg.map_version = _map.version();
  msg.replan_request = replan_request;
  return msg;
}

void RobotSim::publish_pose(bool replan_request)
{
  _fabric.publish(_pose_pub, encode(make_pose(replan_request)));
}

} // namespace fleet::robot
