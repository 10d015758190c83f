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

#include <fleet/messaging/envelope.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fleet {

using CellId = int;

/// Planned route for one robot, published on "/<Robot>/goalNodesList".
struct PathMsg
{
  std::string robot;
  std::vector<CellId> cells;
  std::uint64_t map_version = 0;
  /// Per-robot command counter shared with CancelFlag; 0 means unsequenced.
  std::uint64_t seq = 0;

  nlohmann::json to_json() const;
  static PathMsg from_json(const nlohmann::json& json);
  bool operator==(const PathMsg&) const = default;
};

/// Published on "/<Robot>/cancelGoal"; value is 0 or 1.
struct CancelFlag
{
  std::string robot;
  int value = 0;
  std::uint64_t map_version = 0;
  std::uint64_t seq = 0;

  nlohmann::json to_json() const;
  /// Also accepts a bare 0 or 1.
  static CancelFlag from_json(const nlohmann::json& json);
  bool operator==(const CancelFlag&) const = default;
};

/// Robot pose in cell units, published on "/<Robot>/amcl_pose". A robot
/// that rejects a path sets replan_request.
struct PoseMsg
{
  std::string robot;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  CellId cell = 0;
  std::string status;
  std::uint64_t map_version = 0;
  bool replan_request = false;

  nlohmann::json to_json() const;
  static PoseMsg from_json(const nlohmann::json& json);
};

/// A blocked cell seen by a robot sensor, published on "/<Robot>/obstacle".
struct ObstacleReport
{
  std::string robot;
  CellId cell = 0;
  std::uint64_t map_version = 0;

  nlohmann::json to_json() const;
  static ObstacleReport from_json(const nlohmann::json& json);
  bool operator==(const ObstacleReport&) const = default;
};

/// Goal outcome notices on "/<Robot>/goalStatus".
struct GoalStatus
{
  std::string robot;
  std::string status;  // "assigned", "unreachable"
  CellId goal = 0;
  std::uint64_t map_version = 0;

  nlohmann::json to_json() const;
  static GoalStatus from_json(const nlohmann::json& json);
};

/// "/map" traffic: either a full snapshot or a single-cell delta.
struct MapMsg
{
  std::string kind = "snapshot";  // "snapshot" or "delta"
  int width = 0;
  int height = 0;
  std::vector<CellId> blocked;
  std::uint64_t version = 0;
  CellId cell = -1;
  bool cell_blocked = false;
  std::string source;

  nlohmann::json to_json() const;
  static MapMsg from_json(const nlohmann::json& json);
};

/// Encodes a message as compact JSON bytes.
template<typename Msg>
messaging::Bytes encode(const Msg& msg)
{
  const std::string text = msg.to_json().dump();
  return messaging::Bytes(text.begin(), text.end());
}

/// Parses a payload; nullopt when it is not valid for the message type.
template<typename Msg>
std::optional<Msg> decode(const messaging::Envelope& envelope)
{
  try
  {
    return Msg::from_json(nlohmann::json::parse(envelope.payload_string()));
  }
  catch (const std::exception&)
  {
    return std::nullopt;
  }
}

/// Per-robot topic names.
std::string goal_topic(const std::string& robot);
std::string cancel_topic(const std::string& robot);
std::string pose_topic(const std::string& robot);
std::string obstacle_topic(const std::string& robot);
std::string goal_status_topic(const std::string& robot);
std::string scan_topic(const std::string& robot);
inline constexpr const char* kMapTopic = "/map";

} // namespace fleet
