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

#include <fleet/app/scenario.hpp>
#include <fleet/bench/metrics.hpp>
#include <fleet/errors.hpp>
#include <fleet/events.hpp>
#include <fleet/planner/global_planner.hpp>
#include <fleet/robot/robot_sim.hpp>
#include <fleet/topology/fabric.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fleet::app {

using topology::Topology;

struct SimResult
{
  std::vector<nlohmann::json> events;
  std::map<std::string, CellId> final_cells;
  bool goals_resolved = false;
  bench::MetricsRecord metrics;

  /// One compact JSON object per line.
  std::string events_jsonl() const;
};

/// Runs a scenario on the virtual clock: planner on the server, one host per
/// robot, scripted goals and obstacles. Event times are nanoseconds since
/// the scenario started, which is after the topology finished warming up.
class SimRunner
{
public:
  /// Throws InvalidConfig for an invalid scenario.
  explicit SimRunner(Scenario scenario, std::optional<Topology> topology = std::nullopt);
  ~SimRunner();

  SimRunner(const SimRunner&) = delete;
  SimRunner& operator=(const SimRunner&) = delete;

  const Scenario& scenario() const { return _scenario; }
  Topology topology() const { return _topology; }

  /// Ports the cloud master advertises; only read by prepare().
  void set_cloud_options(const topology::CloudOptions& options) { _cloud = options; }

  /// Receives every event as it is logged.
  void set_observer(EventSink observer) { _observer = std::move(observer); }

  /// Builds the stack, warms the topology up and schedules the scripts.
  void prepare();

  /// Advances to `t` seconds of scenario time, never past the duration.
  void advance_to(double t);
  double now() const;
  bool finished() const;

  SimResult finish();
  SimResult run();

  // Operator commands; failures are logged as "command_rejected" and
  // rethrown.
  planner::MapDelta block_cell(CellId cell);
  planner::MapDelta unblock_cell(CellId cell);
  std::optional<PathMsg> assign_goal(const std::string& robot, CellId cell);

  planner::GlobalPlanner& planner() { return *_planner; }
  const std::vector<std::unique_ptr<robot::RobotSim>>& robots() const { return _robots; }
  messaging::Network& network() { return *_network; }
  topology::Fabric& fabric() { return *_fabric; }

private:
  void log(nlohmann::json event);
  void reject(const std::string& command, const nlohmann::json& args, const Error& error);
  messaging::TimeNs at(double t) const;

  Scenario _scenario;
  Topology _topology;
  EventSink _observer;
  topology::CloudOptions _cloud;
  messaging::EventLoop _loop;
  std::unique_ptr<messaging::Network> _network;
  std::unique_ptr<topology::Fabric> _fabric;
  std::unique_ptr<planner::GlobalPlanner> _planner;
  std::vector<std::unique_ptr<robot::RobotSim>> _robots;
  std::vector<nlohmann::json> _events;
  std::optional<bench::CounterSnapshot> _begin;
  std::vector<std::string> _hosts;
  messaging::TimeNs _t0 = 0;
  bool _prepared = false;
};

/// Final cell of every robot according to an event log.
std::map<std::string, CellId> replay_final_cells(const std::vector<nlohmann::json>& events);

/// Reads a line-delimited event log. Throws IoError, InvalidConfig.
std::vector<nlohmann::json> read_event_log(const std::string& path);

} // namespace fleet::app
