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

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fleet::planner {

enum class BlockSource { Operator, RobotSensor, Erp };

std::string_view to_string(BlockSource source);
BlockSource parse_block_source(std::string_view text);

/// Result of a single block or unblock request.
struct MapDelta
{
  CellId cell = -1;
  bool blocked = false;
  /// False when the blocked set did not change.
  bool changed = false;
  std::uint64_t version = 0;
  BlockSource source = BlockSource::Operator;

  MapMsg to_msg() const;
};

/// Occupancy grid. Cells are numbered 0-based, row-major, starting at the
/// north-west corner; rows grow southwards and columns eastwards.
class GridMap
{
public:
  GridMap() : GridMap(8, 8) {}
  GridMap(int width, int height);

  int width() const { return _width; }
  int height() const { return _height; }
  int size() const { return _width * _height; }
  std::uint64_t version() const { return _version; }

  bool in_range(CellId cell) const { return cell >= 0 && cell < size(); }

  /// Throws InvalidCell.
  void require_cell(CellId cell) const;

  int row(CellId cell) const { return cell / _width; }
  int col(CellId cell) const { return cell % _width; }
  CellId cell_at(int row, int col) const { return row * _width + col; }

  /// In-range 4-neighbours in the order North, East, South, West.
  std::vector<CellId> neighbours(CellId cell) const;
  bool adjacent(CellId a, CellId b) const;
  int manhattan(CellId a, CellId b) const;

  bool blocked(CellId cell) const { return _blocked.contains(cell); }
  const std::set<CellId>& blocked_cells() const { return _blocked; }
  std::optional<BlockSource> source_of(CellId cell) const;

  /// Cost of entering a cell. Always 1 for now.
  double cost(CellId cell) const;

  /// Every call bumps the version, even when the cell was already blocked.
  MapDelta block(CellId cell, BlockSource source = BlockSource::Operator);

  /// Unblocking a free cell changes nothing and keeps the version.
  MapDelta unblock(CellId cell);

  /// Applies a "/map" message received from the planner.
  void apply(const MapMsg& msg);

  MapMsg snapshot() const;

  /// {"width","height","blocked":[ids],"version"}
  nlohmann::json to_json() const;
  static GridMap from_json(const nlohmann::json& json);
  static GridMap load(const std::string& path);
  void save(const std::string& path) const;

private:
  int _width;
  int _height;
  std::set<CellId> _blocked;
  std::map<CellId, BlockSource> _sources;
  std::uint64_t _version = 0;
};

/// Shortest 4-connected path from start to goal, both included. Ties between
/// equally short paths are broken by walking back from the goal and taking
/// the first predecessor in North, East, South, West order. Returns nullopt
/// when the goal is blocked or cut off. Throws InvalidCell for out-of-range
/// cells or a blocked start.
std::optional<std::vector<CellId>> plan_path(
  const GridMap& map, CellId start, CellId goal);

/// True when every step is 4-adjacent and no cell is blocked.
bool path_valid(const GridMap& map, const std::vector<CellId>& cells);

} // namespace fleet::planner
