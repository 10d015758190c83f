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

#include <fleet/messages.hpp>
#include <fleet/messaging/link_model.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fleet::app {

struct RobotSpec
{
  std::string name;
  CellId start = 0;
  double speed = 1.0;
  int sensor_range = 2;
  double pose_rate = 5.0;
  double noise_sigma = 0.0;
};

struct GoalEvent
{
  double t = 0.0;
  std::string robot;
  CellId cell = 0;
};

/// action is "block", "unblock" or "surprise". A surprise obstacle is known
/// only to `robot` until its sensors report it.
struct ObstacleEvent
{
  double t = 0.0;
  CellId cell = 0;
  std::string action = "block";
  std::string robot;
};

struct Scenario
{
  std::string name = "scenario";
  int width = 8;
  int height = 8;
  std::vector<CellId> blocked;
  std::string topology = "single";
  std::optional<std::uint64_t> seed;
  double duration = 60.0;
  messaging::LinkModel link;
  std::size_t header_bytes = 64;
  double planner_debounce = 0.05;
  std::vector<RobotSpec> robots;
  std::vector<GoalEvent> goals;
  std::vector<ObstacleEvent> obstacles;

  /// Keys present in the document but not modeled.
  std::vector<std::string> warnings;

  /// Throws InvalidConfig with line/column for syntax errors and the field
  /// path for schema errors.
  static Scenario parse(std::string_view text);
  static Scenario from_json(const nlohmann::json& json);
  static Scenario load(const std::string& path);
  nlohmann::json to_json() const;

  /// Cells in range, unique robot names, known robots in scripts,
  /// non-decreasing script times, a seed, positive duration. Throws
  /// InvalidConfig.
  void validate() const;
};

/// The three-robot, cell-26 scenario shipped with the repository.
Scenario fig6_scenario();

} // namespace fleet::app
