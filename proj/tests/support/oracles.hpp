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

#include <fleet/planner/grid_map.hpp>

#include <optional>
#include <queue>
#include <vector>

namespace fleet::oracle {

/// Breadth-first search over the grid, written without the planner's code.
/// Returns the number of moves from start to goal, or nullopt.
inline std::optional<int> bfs_distance(
  int width, int height, const std::vector<bool>& blocked, int start, int goal)
{
  if (blocked[start] || blocked[goal])
    return std::nullopt;
  std::vector<int> dist(static_cast<std::size_t>(width * height), -1);
  std::queue<int> open;
  dist[start] = 0;
  open.push(start);
  while (!open.empty())
  {
    const int cell = open.front();
    open.pop();
    if (cell == goal)
      return dist[cell];
    const int r = cell / width;
    const int c = cell % width;
    const int dr[4] = {-1, 0, 1, 0};
    const int dc[4] = {0, 1, 0, -1};
    for (int k = 0; k < 4; ++k)
    {
      const int nr = r + dr[k];
      const int nc = c + dc[k];
      if (nr < 0 || nr >= height || nc < 0 || nc >= width)
        continue;
      const int next = nr * width + nc;
      if (blocked[next] || dist[next] >= 0)
        continue;
      dist[next] = dist[cell] + 1;
      open.push(next);
    }
  }
  return std::nullopt;
}

inline std::vector<bool> blocked_mask(const planner::GridMap& map)
{
  std::vector<bool> mask(static_cast<std::size_t>(map.size()), false);
  for (const int cell : map.blocked_cells())
    mask[cell] = true;
  return mask;
}

} // namespace fleet::oracle
