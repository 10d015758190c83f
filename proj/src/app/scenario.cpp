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
#include <fleet/app/scenario.hpp>

#include <fleet/errors.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fleet::app {

namespace {

using nlohmann::json;

void check_keys(const json& object, const std::string& where,
  const std::set<std::string>& known, std::vector<std::string>& warnings)
{
  for (const auto& [key, value] : object.items())
  {
    if (!known.contains(key))
      warnings.push_back("ignoring unmodeled key '" + where + key + "'");
  }
}

template<typename T>
T field(const json& object, const std::string& key, const std::string& path, T fallback)
{
  if (!object.contains(key))
    return fallback;
  try
  {
    return object.at(key).get<T>();
  }
  catch (const json::exception&)
  {
    throw Error(ErrorCode::InvalidConfig, "field '" + path + key + "' has the wrong type");
  }
}

template<typename T>
T required(const json& object, const std::string& key, const std::string& path)
{
  if (!object.contains(key))
    throw Error(ErrorCode::InvalidConfig, "missing field '" + path + key + "'");
  return field<T>(object, key, path, T{});
}

const json& array_field(const json& object, const std::string& key)
{
  static const json empty = json::array();
  if (!object.contains(key))
    return empty;
  if (!object.at(key).is_array())
    throw Error(ErrorCode::InvalidConfig, "field '" + key + "' must be an array");
  return object.at(key);
}

} // anonymous namespace

Scenario Scenario::parse(std::string_view text)
{
  json document;
  try
  {
    document = json::parse(text);
  }
  catch (const json::parse_error& e)
  {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
    {
      if (text[i] == '\n')
      {
        ++line;
        column = 1;
      }
      else
      {
        ++column;
      }
    }
    throw Error(ErrorCode::InvalidConfig, "syntax error at line " + std::to_string(line)
      + ", column " + std::to_string(column));
  }
  return from_json(document);
}

Scenario Scenario::from_json(const json& document)
{
  if (!document.is_object())
    throw Error(ErrorCode::InvalidConfig, "scenario must be a JSON object");

  Scenario s;
  check_keys(document, "", {"name", "grid", "blocked", "topology", "seed", "duration",
    "link", "headerBytes", "plannerDebounce", "robots", "goals", "obstacles", "$schema"},
    s.warnings);
  s.name = field<std::string>(document, "name", "", s.name);
  if (document.contains("grid"))
  {
    const auto& grid = document.at("grid");
    if (!grid.is_object())
      throw Error(ErrorCode::InvalidConfig, "field 'grid' must be an object");
    s.width = field<int>(grid, "width", "grid.", s.width);
    s.height = field<int>(grid, "height", "grid.", s.height);
  }
  s.blocked = field<std::vector<CellId>>(document, "blocked", "", {});
  s.topology = field<std::string>(document, "topology", "", s.topology);
  if (document.contains("seed"))
    s.seed = field<std::uint64_t>(document, "seed", "", 0);
  s.duration = field<double>(document, "duration", "", s.duration);
  s.header_bytes = field<std::size_t>(document, "headerBytes", "", s.header_bytes);
  s.planner_debounce = field<double>(document, "plannerDebounce", "", s.planner_debounce);
  if (document.contains("link"))
  {
    const auto& link = document.at("link");
    if (!link.is_object())
      throw Error(ErrorCode::InvalidConfig, "field 'link' must be an object");
    check_keys(link, "link.", {"baseLatency", "bandwidth", "jitter", "lossRate"}, s.warnings);
    s.link.base_latency = field<double>(link, "baseLatency", "link.", s.link.base_latency);
    s.link.bandwidth = field<double>(link, "bandwidth", "link.", s.link.bandwidth);
    s.link.jitter = field<double>(link, "jitter", "link.", s.link.jitter);
    s.link.loss_rate = field<double>(link, "lossRate", "link.", s.link.loss_rate);
  }

  const auto& robots = array_field(document, "robots");
  for (std::size_t i = 0; i < robots.size(); ++i)
  {
    const std::string path = "robots[" + std::to_string(i) + "].";
    const auto& r = robots[i];
    if (!r.is_object())
      throw Error(ErrorCode::InvalidConfig, "field 'robots[" + std::to_string(i) + "]' must be an object");
    check_keys(r, path, {"name", "start", "speed", "sensorRange", "poseRate", "noiseSigma"},
      s.warnings);
    RobotSpec spec;
    spec.name = required<std::string>(r, "name", path);
    spec.start = required<CellId>(r, "start", path);
    spec.speed = field<double>(r, "speed", path, spec.speed);
    spec.sensor_range = field<int>(r, "sensorRange", path, spec.sensor_range);
    spec.pose_rate = field<double>(r, "poseRate", path, spec.pose_rate);
    spec.noise_sigma = field<double>(r, "noiseSigma", path, spec.noise_sigma);
    s.robots.push_back(spec);
  }

  const auto& goals = array_field(document, "goals");
  for (std::size_t i = 0; i < goals.size(); ++i)
  {
    const std::string path = "goals[" + std::to_string(i) + "].";
    const auto& g = goals[i];
    if (!g.is_object())
      throw Error(ErrorCode::InvalidConfig, "field 'goals[" + std::to_string(i) + "]' must be an object");
    check_keys(g, path, {"t", "robot", "cell"}, s.warnings);
    s.goals.push_back(GoalEvent{required<double>(g, "t", path),
      required<std::string>(g, "robot", path), required<CellId>(g, "cell", path)});
  }

  const auto& obstacles = array_field(document, "obstacles");
  for (std::size_t i = 0; i < obstacles.size(); ++i)
  {
    const std::string path = "obstacles[" + std::to_string(i) + "].";
    const auto& o = obstacles[i];
    if (!o.is_object())
      throw Error(ErrorCode::InvalidConfig, "field 'obstacles[" + std::to_string(i) + "]' must be an object");
    check_keys(o, path, {"t", "cell", "action", "robot"}, s.warnings);
    ObstacleEvent event;
    event.t = required<double>(o, "t", path);
    event.cell = required<CellId>(o, "cell", path);
    event.action = field<std::string>(o, "action", path, event.action);
    event.robot = field<std::string>(o, "robot", path, "");
    s.obstacles.push_back(event);
  }
  return s;
}

Scenario Scenario::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot read " + path);
  std::stringstream text;
  text << in.rdbuf();
  try
  {
    return parse(text.str());
  }
  catch (const Error& e)
  {
    throw Error(e.code(), path + ": " + e.detail());
  }
}

json Scenario::to_json() const
{
  json robots_json = json::array();
  for (const auto& r : robots)
  {
    robots_json.push_back({{"name", r.name}, {"start", r.start}, {"speed", r.speed},
      {"sensorRange", r.sensor_range}, {"poseRate", r.pose_rate},
      {"noiseSigma", r.noise_sigma}});
  }
  json goals_json = json::array();
  for (const auto& g : goals)
    goals_json.push_back({{"t", g.t}, {"robot", g.robot}, {"cell", g.cell}});
  json obstacles_json = json::array();
  for (const auto& o : obstacles)
  {
    json item{{"t", o.t}, {"cell", o.cell}, {"action", o.action}};
    if (!o.robot.empty())
      item["robot"] = o.robot;
    obstacles_json.push_back(item);
  }
  json out{
    {"name", name},
    {"grid", {{"width", width}, {"height", height}}},
    {"blocked", blocked},
    {"topology", topology},
    {"duration", duration},
    {"link", {{"baseLatency", link.base_latency}, {"bandwidth", link.bandwidth},
      {"jitter", link.jitter}, {"lossRate", link.loss_rate}}},
    {"headerBytes", header_bytes},
    {"plannerDebounce", planner_debounce},
    {"robots", robots_json},
    {"goals", goals_json},
    {"obstacles", obstacles_json},
  };
  if (seed)
    out["seed"] = *seed;
  return out;
}

void Scenario::validate() const
{
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (width <= 0 || height <= 0)
    fail("grid dimensions must be positive");
  const int size = width * height;
  const auto check_cell = [&](CellId cell, const std::string& where)
    {
      if (cell < 0 || cell >= size)
        fail(where + ": cell " + std::to_string(cell) + " outside "
          + std::to_string(width) + "x" + std::to_string(height) + " grid");
    };
  if (!seed)
    fail("missing field 'seed' (required in sim mode)");
  if (!(duration > 0.0))
    fail("field 'duration' must be > 0");
  if (planner_debounce < 0.0)
    fail("field 'plannerDebounce' must be >= 0");
  try
  {
    link.validate();
  }
  catch (const Error& e)
  {
    fail("link: " + e.detail());
  }
  for (const CellId cell : blocked)
    check_cell(cell, "blocked");

  std::set<std::string> names;
  std::set<CellId> starts;
  for (std::size_t i = 0; i < robots.size(); ++i)
  {
    const auto& r = robots[i];
    const std::string where = "robots[" + std::to_string(i) + "]";
    if (r.name.empty())
      fail(where + ".name is empty");
    if (!names.insert(r.name).second)
      fail(where + ".name '" + r.name + "' is used twice");
    check_cell(r.start, where + ".start");
    if (std::find(blocked.begin(), blocked.end(), r.start) != blocked.end())
      fail(where + ".start is a blocked cell");
    if (!starts.insert(r.start).second)
      fail(where + ".start is shared with another robot");
    if (!(r.speed > 0.0))
      fail(where + ".speed must be > 0");
    if (r.sensor_range < 1)
      fail(where + ".sensorRange must be >= 1");
    if (!(r.pose_rate > 0.0))
      fail(where + ".poseRate must be > 0");
    if (r.noise_sigma < 0.0)
      fail(where + ".noiseSigma must be >= 0");
  }

  double last = 0.0;
  for (std::size_t i = 0; i < goals.size(); ++i)
  {
    const auto& g = goals[i];
    const std::string where = "goals[" + std::to_string(i) + "]";
    if (g.t < last)
      fail(where + ".t goes backwards");
    last = g.t;
    if (!names.contains(g.robot))
      fail(where + ".robot '" + g.robot + "' is not declared");
    check_cell(g.cell, where + ".cell");
  }
  last = 0.0;
  for (std::size_t i = 0; i < obstacles.size(); ++i)
  {
    const auto& o = obstacles[i];
    const std::string where = "obstacles[" + std::to_string(i) + "]";
    if (o.t < last)
      fail(where + ".t goes backwards");
    last = o.t;
    check_cell(o.cell, where + ".cell");
    if (o.action != "block" && o.action != "unblock" && o.action != "surprise")
      fail(where + ".action must be block, unblock or surprise");
    if (o.action == "surprise" && !names.contains(o.robot))
      fail(where + ".robot '" + o.robot + "' is not declared");
  }
}

Scenario fig6_scenario()
{
  Scenario s;
  s.name = "fig6";
  s.seed = 6;
  s.duration = 40.0;
  s.link.jitter = 0.0005;
  s.robots = {
    RobotSpec{"Robot1", 30, 0.5, 2, 5.0, 0.05},
    RobotSpec{"Robot2", 2, 0.5, 2, 5.0, 0.05},
    RobotSpec{"Robot3", 56, 0.5, 2, 5.0, 0.05},
  };
  s.goals = {
    GoalEvent{0.0, "Robot1", 24},
    GoalEvent{0.0, "Robot2", 58},
    GoalEvent{0.0, "Robot3", 63},
  };
  s.obstacles = {ObstacleEvent{5.0, 26, "block", ""}};
  return s;
}

} // namespace fleet::app
