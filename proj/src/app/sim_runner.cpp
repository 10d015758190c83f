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
#include <fleet/app/sim_runner.hpp>

#include <fleet/errors.hpp>

#include <fstream>
#include <sstream>

namespace fleet::app {

using messaging::TimeNs;
using messaging::seconds_to_ns;

std::string SimResult::events_jsonl() const
{
  std::string out;
  for (const auto& event : events)
  {
    out += event.dump();
    out += '\n';
  }
  return out;
}

SimRunner::SimRunner(Scenario scenario, std::optional<Topology> topology)
: _scenario(std::move(scenario))
, _topology(topology.value_or(topology::parse_topology(_scenario.topology)))
{
  _scenario.validate();
}

SimRunner::~SimRunner() = default;

void SimRunner::log(nlohmann::json event)
{
  if (event.contains("t"))
    event["t"] = event["t"].get<TimeNs>() - _t0;
  else
    event["t"] = _loop.now() - _t0;
  _events.push_back(event);
  if (_observer)
    _observer(_events.back());
}

void SimRunner::reject(const std::string& command, const nlohmann::json& args, const Error& error)
{
  log({{"type", "command_rejected"}, {"command", command}, {"args", args},
    {"error", std::string(to_string(error.code()))}, {"detail", error.detail()}});
}

TimeNs SimRunner::at(double t) const
{
  return _t0 + seconds_to_ns(t);
}

void SimRunner::prepare()
{
  if (_prepared)
    return;
  messaging::NetworkOptions options;
  options.header_bytes = _scenario.header_bytes;
  _network = std::make_unique<messaging::Network>(
    _loop, *_scenario.seed, _scenario.link, options);
  _fabric = topology::make_fabric(_topology, *_network, "server", _cloud);

  planner::GridMap map(_scenario.width, _scenario.height);
  for (const CellId cell : _scenario.blocked)
    map.block(cell);
  planner::PlannerOptions planner_options;
  planner_options.debounce = seconds_to_ns(_scenario.planner_debounce);
  _planner = std::make_unique<planner::GlobalPlanner>(*_fabric, map, planner_options);
  const EventSink sink = [this](const nlohmann::json& event) { log(event); };
  _planner->set_event_sink(sink);
  _planner->start();

  _hosts = {"server"};
  std::uint64_t index = 0;
  for (const auto& spec : _scenario.robots)
  {
    robot::RobotParams params;
    params.name = spec.name;
    params.start = spec.start;
    params.speed = spec.speed;
    params.sensor_range = spec.sensor_range;
    params.pose_rate = spec.pose_rate;
    params.noise_sigma = spec.noise_sigma;
    params.seed = *_scenario.seed * 1000 + (++index);
    auto sim = std::make_unique<robot::RobotSim>(*_fabric, params, map);
    sim->set_event_sink(sink);
    _planner->add_robot(spec.name, spec.start);
    sim->connect();
    _hosts.push_back(spec.name);
    _robots.push_back(std::move(sim));
  }

  _fabric->start();
  _loop.run_until(_loop.now() + _fabric->warmup());
  _t0 = _loop.now();
  _begin = bench::CounterSnapshot::take(*_network, _hosts);

  log({{"type", "start"}, {"scenario", _scenario.name},
    {"topology", std::string(topology::to_string(_topology))},
    {"seed", *_scenario.seed}, {"grid", {_scenario.width, _scenario.height}}});
  for (auto& sim : _robots)
    sim->start();
  _planner->publish_snapshot();

  for (const auto& goal : _scenario.goals)
  {
    _loop.schedule_at(at(goal.t), [this, goal]()
      {
        try
        {
          assign_goal(goal.robot, goal.cell);
        }
        catch (const Error&)
        {
        }
      });
  }
  for (const auto& obstacle : _scenario.obstacles)
  {
    _loop.schedule_at(at(obstacle.t), [this, obstacle]()
      {
        try
        {
          if (obstacle.action == "block")
          {
            block_cell(obstacle.cell);
          }
          else if (obstacle.action == "unblock")
          {
            unblock_cell(obstacle.cell);
          }
          else
          {
            for (auto& sim : _robots)
            {
              if (sim->name() == obstacle.robot)
                sim->add_local_obstacle(obstacle.cell);
            }
            log({{"type", "surprise_obstacle"}, {"robot", obstacle.robot},
              {"cell", obstacle.cell}});
          }
        }
        catch (const Error&)
        {
        }
      });
  }
  _prepared = true;
}

void SimRunner::advance_to(double t)
{
  prepare();
  const double capped = std::min(t, _scenario.duration);
  const TimeNs until = at(capped);
  if (until > _loop.now())
    _loop.run_until(until);
}

double SimRunner::now() const
{
  return messaging::ns_to_seconds(_loop.now() - _t0);
}

bool SimRunner::finished() const
{
  return _prepared && _loop.now() >= at(_scenario.duration);
}

planner::MapDelta SimRunner::block_cell(CellId cell)
{
  prepare();
  try
  {
    return _planner->block_cell(cell, planner::BlockSource::Operator);
  }
  catch (const Error& e)
  {
    reject("block_cell", {{"cell", cell}}, e);
    throw;
  }
}

planner::MapDelta SimRunner::unblock_cell(CellId cell)
{
  prepare();
  try
  {
    return _planner->unblock_cell(cell);
  }
  catch (const Error& e)
  {
    reject("unblock_cell", {{"cell", cell}}, e);
    throw;
  }
}

std::optional<PathMsg> SimRunner::assign_goal(const std::string& robot, CellId cell)
{
  prepare();
  try
  {
    return _planner->assign_goal(robot, cell);
  }
  catch (const Error& e)
  {
    reject("assign_goal", {{"robot", robot}, {"cell", cell}}, e);
    throw;
  }
}

SimResult SimRunner::finish()
{
  advance_to(_scenario.duration);
  SimResult result;
  for (const auto& sim : _robots)
    result.final_cells[sim->name()] = sim->current_cell();
  result.goals_resolved = _planner->all_goals_resolved();
  log({{"type", "end"}, {"finalCells", result.final_cells},
    {"goalsResolved", result.goals_resolved}});
  result.events = _events;
  const auto end = bench::CounterSnapshot::take(*_network, _hosts);
  result.metrics = bench::capture(_scenario.name,
    std::string(topology::to_string(_topology)), *_begin, end, "server");
  return result;
}

SimResult SimRunner::run()
{
  prepare();
  return finish();
}

std::map<std::string, CellId> replay_final_cells(const std::vector<nlohmann::json>& events)
{
  std::map<std::string, CellId> cells;
  for (const auto& event : events)
  {
    const std::string type = event.value("type", "");
    if ((type == "spawn" || type == "cell") && event.contains("robot"))
      cells[event.at("robot").get<std::string>()] = event.at("cell").get<CellId>();
  }
  return cells;
}

std::vector<nlohmann::json> read_event_log(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot read " + path);
  std::vector<nlohmann::json> events;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line))
  {
    ++number;
    if (line.empty())
      continue;
    try
    {
      events.push_back(nlohmann::json::parse(line));
    }
    catch (const nlohmann::json::parse_error&)
    {
      throw Error(ErrorCode::InvalidConfig, path + ": line " + std::to_string(number)
        + " is not JSON");
    }
  }
  return events;
}

} // namespace fleet::app
