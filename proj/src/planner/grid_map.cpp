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
#include <fleet/planner/grid_map.hpp>

#include <fleet/errors.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

namespace fleet::planner {

std::string_view to_string(BlockSource source)
{
  switch (source)
  {
    case BlockSource::Operator: return "operator";
    case BlockSource::RobotSensor: return "robot-sensor";
    case BlockSource::Erp: return "erp";
  }
  return "operator";
}

BlockSource parse_block_source(std::string_view text)
{
  if (text == "operator" || text.empty())
    return BlockSource::Operator;
  if (text == "robot-sensor")
    return BlockSource::RobotSensor;
  if (text == "erp")
    return BlockSource::Erp;
  throw Error(ErrorCode::InvalidArgument, "unknown block source '" + std::string(text) + "'");
}

MapMsg MapDelta::to_msg() const
{
  MapMsg msg;
  msg.kind = "delta";
  msg.cell = cell;
  msg.cell_blocked = blocked;
  msg.version = version;
  msg.source = std::string(to_string(source));
  return msg;
}

//==============================================================================
GridMap::GridMap(int width, int height)
: _width(width)
, _height(height)
{
  if (width <= 0 || height <= 0)
    throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
}

void GridMap::require_cell(CellId cell) const
{
  if (!in_range(cell))
  {
    throw Error(ErrorCode::InvalidCell, "cell " + std::to_string(cell)
      + " outside " + std::to_string(_width) + "x" + std::to_string(_height) + " grid");
  }
}

std::vector<CellId> GridMap::neighbours(CellId cell) const
{
  std::vector<CellId> out;
  out.reserve(4);
  const int r = row(cell);
  const int c = col(cell);
  if (r > 0)
    out.push_back(cell_at(r - 1, c));
  if (c + 1 < _width)
    out.push_back(cell_at(r, c + 1));
  if (r + 1 < _height)
    out.push_back(cell_at(r + 1, c));
  if (c > 0)
    out.push_back(cell_at(r, c - 1));
  return out;
}

bool GridMap::adjacent(CellId a, CellId b) const
{
  return in_range(a) && in_range(b) && manhattan(a, b) == 1;
}

int GridMap::manhattan(CellId a, CellId b) const
{
  return std::abs(row(a) - row(b)) + std::abs(col(a) - col(b));
}

std::optional<BlockSource> GridMap::source_of(CellId cell) const
{
  const auto it = _sources.find(cell);
  if (it == _sources.end())
    return std::nullopt;
  return it->second;
}

double GridMap::cost(CellId) const
{
  return 1.0;
}

MapDelta GridMap::block(CellId cell, BlockSource source)
{
  require_cell(cell);
  MapDelta delta;
  delta.cell = cell;
  delta.blocked = true;
  delta.source = source;
  delta.changed = _blocked.insert(cell).second;
  if (delta.changed)
    _sources[cell] = source;
  delta.version = ++_version;
  return delta;
}

MapDelta GridMap::unblock(CellId cell)
{
  require_cell(cell);
  MapDelta delta;
  delta.cell = cell;
  delta.blocked = false;
  delta.source = source_of(cell).value_or(BlockSource::Operator);
  delta.changed = _blocked.erase(cell) > 0;
  if (delta.changed)
  {
    _sources.erase(cell);
    ++_version;
  }
  delta.version = _version;
  return delta;
}

void GridMap::apply(const MapMsg& msg)
{
  if (msg.kind == "delta")
  {
    require_cell(msg.cell);
    if (msg.cell_blocked)
    {
      _blocked.insert(msg.cell);
      _sources[msg.cell] = parse_block_source(msg.source);
    }
    else
    {
      _blocked.erase(msg.cell);
      _sources.erase(msg.cell);
    }
  }
  else
  {
    if (msg.width != _width || msg.height != _height)
      *this = GridMap(msg.width, msg.height);
    _blocked.clear();
    _sources.clear();
    for (const CellId cell : msg.blocked)
    {
      require_cell(cell);
      _blocked.insert(cell);
      _sources[cell] = BlockSource::Operator;
    }
  }
  _version = msg.version;
}

MapMsg GridMap::snapshot() const
{
  MapMsg msg;
  msg.kind = "snapshot";
  msg.width = _width;
  msg.height = _height;
  msg.blocked.assign(_blocked.begin(), _blocked.end());
  msg.version = _version;
  return msg;
}

nlohmann::json GridMap::to_json() const
{
  return {{"width", _width}, {"height", _height},
    {"blocked", std::vector<CellId>(_blocked.begin(), _blocked.end())},
    {"version", _version}};
}

GridMap GridMap::from_json(const nlohmann::json& json)
{
  try
  {
    GridMap map(json.at("width").get<int>(), json.at("height").get<int>());
    for (const CellId cell : json.value("blocked", std::vector<CellId>{}))
    {
      map.require_cell(cell);
      map._blocked.insert(cell);
      map._sources[cell] = BlockSource::Operator;
    }
    map._version = json.value("version", std::uint64_t{0});
    return map;
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorCode::InvalidConfig, std::string("map snapshot: ") + e.what());
  }
}

GridMap GridMap::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot read " + path);
  std::stringstream text;
  text << in.rdbuf();
  try
  {
    return from_json(nlohmann::json::parse(text.str()));
  }
  catch (const nlohmann::json::parse_error& e)
  {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
}

void GridMap::save(const std::string& path) const
{
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write " + path);
  out << to_json().dump() << "\n";
}

//==============================================================================
std::optional<std::vector<CellId>> plan_path(
  const GridMap& map, CellId start, CellId goal)
{
  map.require_cell(start);
  map.require_cell(goal);
  if (map.blocked(start))
    throw Error(ErrorCode::InvalidCell, "start cell " + std::to_string(start) + " is blocked");
  if (map.blocked(goal))
    return std::nullopt;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(map.size()), kInf);
  using Item = std::pair<double, CellId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> open;
  dist[start] = 0.0;
  open.push({0.0, start});
  while (!open.empty())
  {
    const auto [d, cell] = open.top();
    open.pop();
    if (d > dist[cell])
      continue;
    if (cell == goal)
      break;
    for (const CellId next : map.neighbours(cell))
    {
      if (map.blocked(next))
        continue;
      const double nd = d + map.cost(next);
      if (nd < dist[next])
      {
        dist[next] = nd;
        open.push({nd, next});
      }
    }
  }
  if (dist[goal] == kInf)
    return std::nullopt;

  std::vector<CellId> path{goal};
  CellId cell = goal;
  while (cell != start)
  {
    const double want = dist[cell] - map.cost(cell);
    CellId chosen = -1;
    for (const CellId prev : map.neighbours(cell))
    {
      if (!map.blocked(prev) && dist[prev] == want)
      {
        chosen = prev;
        break;
      }
    }
    cell = chosen;
    path.push_back(cell);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

bool path_valid(const GridMap& map, const std::vector<CellId>& cells)
{
  for (std::size_t i = 0; i < cells.size(); ++i)
  {
    if (!map.in_range(cells[i]) || map.blocked(cells[i]))
      return false;
    if (i > 0 && !map.adjacent(cells[i - 1], cells[i]))
      return false;
  }
  return true;
}

} // namespace fleet::planner
