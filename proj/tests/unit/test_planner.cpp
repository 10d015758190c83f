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
#include "../support/oracles.hpp"

#include <fleet/errors.hpp>
#include <fleet/planner/global_planner.hpp>

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

using namespace fleet;
using namespace fleet::planner;
using fleet::messaging::EventLoop;
using fleet::messaging::Network;
using fleet::messaging::seconds_to_ns;

namespace {

template<typename Fn>
ErrorCode code_of(Fn&& fn)
{
  try
  {
    fn();
  }
  catch (const Error& e)
  {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

} // anonymous namespace

TEST(GridMapTest, RowMajorNumbering)
{
  GridMap map;
  EXPECT_EQ(map.size(), 64);
  EXPECT_EQ(map.row(26), 3);
  EXPECT_EQ(map.col(26), 2);
  EXPECT_EQ(map.neighbours(0), (std::vector<CellId>{1, 8}));
  EXPECT_EQ(map.neighbours(26), (std::vector<CellId>{18, 27, 34, 25}));
}

TEST(GridMapTest, ReblockBumpsVersionOnce)
{
  GridMap map;
  const auto first = map.block(26);
  const auto second = map.block(26);
  EXPECT_TRUE(first.changed);
  EXPECT_FALSE(second.changed);
  EXPECT_EQ(map.version(), 2u);
  EXPECT_EQ(map.blocked_cells().size(), 1u);
}

TEST(GridMapTest, UnblockFreeCellIsNoop)
{
  GridMap map;
  const auto delta = map.unblock(5);
  EXPECT_FALSE(delta.changed);
  EXPECT_EQ(map.version(), 0u);
}

TEST(GridMapTest, OutOfRangeIsInvalidCell)
{
  GridMap map;
  EXPECT_EQ(code_of([&] { map.block(64); }), ErrorCode::InvalidCell);
  EXPECT_EQ(code_of([&] { plan_path(map, -1, 3); }), ErrorCode::InvalidCell);
}

TEST(GridMapTest, SnapshotRoundTrip)
{
  GridMap map(5, 4);
  map.block(3, BlockSource::Erp);
  map.block(7);
  const auto copy = GridMap::from_json(map.to_json());
  EXPECT_EQ(copy.width(), 5);
  EXPECT_EQ(copy.height(), 4);
  EXPECT_EQ(copy.blocked_cells(), map.blocked_cells());
  EXPECT_EQ(copy.version(), 2u);
}

TEST(PlanPathTest, StartEqualsGoal)
{
  GridMap map;
  EXPECT_EQ(plan_path(map, 12, 12), (std::vector<CellId>{12}));
}

TEST(PlanPathTest, AllPairsMatchBfsOnEmptyGrid)
{
  GridMap map;
  const auto mask = oracle::blocked_mask(map);
  int mismatches = 0;
  for (CellId s = 0; s < map.size(); ++s)
  {
    for (CellId g = 0; g < map.size(); ++g)
    {
      const auto path = plan_path(map, s, g);
      const auto oracle = oracle::bfs_distance(8, 8, mask, s, g);
      if (!path || !oracle || static_cast<int>(path->size()) != *oracle + 1
        || path->front() != s || path->back() != g || !path_valid(map, *path))
        ++mismatches;
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(PlanPathTest, RandomObstacleGridsMatchBfs)
{
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial)
  {
    const int w = 5 + static_cast<int>(rng() % 20);
    const int h = 5 + static_cast<int>(rng() % 20);
    GridMap map(w, h);
    std::bernoulli_distribution coin(0.25);
    for (CellId c = 0; c < map.size(); ++c)
      if (coin(rng))
        map.block(c);
    const auto mask = oracle::blocked_mask(map);
    for (int q = 0; q < 50; ++q)
    {
      const CellId s = static_cast<CellId>(rng() % map.size());
      const CellId g = static_cast<CellId>(rng() % map.size());
      if (map.blocked(s))
        continue;
      const auto path = plan_path(map, s, g);
      const auto oracle = oracle::bfs_distance(w, h, mask, s, g);
      ASSERT_EQ(path.has_value(), oracle.has_value()) << s << "->" << g;
      if (path)
      {
        EXPECT_EQ(static_cast<int>(path->size()), *oracle + 1);
        EXPECT_TRUE(path_valid(map, *path));
      }
    }
  }
}

TEST(PlanPathTest, TieBreakPrefersNorthThenEast)
{
  GridMap map;
  // From 0 to 9 both 0-1-9 and 0-8-9 are shortest; walking back from 9 the
  // northern neighbour 1 is tried before the western neighbour 8.
  EXPECT_EQ(plan_path(map, 0, 9), (std::vector<CellId>{0, 1, 9}));
  EXPECT_EQ(plan_path(map, 0, 9), plan_path(map, 0, 9));
}

TEST(PlanPathTest, BlockedGoalOrCutOffIsNoPath)
{
  GridMap map;
  map.block(63);
  EXPECT_FALSE(plan_path(map, 0, 63).has_value());
  GridMap walled(3, 3);
  walled.block(1);
  walled.block(3);
  EXPECT_FALSE(plan_path(walled, 0, 8).has_value());
}

TEST(PlanPathTest, ReplanAvoidsCell26)
{
  GridMap map;
  const auto before = plan_path(map, 24, 31);
  ASSERT_TRUE(before);
  ASSERT_NE(std::find(before->begin(), before->end(), 26), before->end());
  map.block(26);
  const auto after = plan_path(map, 24, 31);
  ASSERT_TRUE(after);
  EXPECT_EQ(std::find(after->begin(), after->end(), 26), after->end());
  const auto mask = oracle::blocked_mask(map);
  EXPECT_EQ(static_cast<int>(after->size()),
    *oracle::bfs_distance(8, 8, mask, 24, 31) + 1);
}

//==============================================================================
class GlobalPlannerTest : public ::testing::Test
{
protected:
  EventLoop loop;
  Network net{loop, 3};
  topology::SingleMasterFabric fabric{net, "server"};
  GlobalPlanner planner{fabric, GridMap{}};
  topology::NodeId probe{"server", "probe", ""};
  std::vector<std::pair<std::string, nlohmann::json>> seen;

  void SetUp() override
  {
    planner.start();
    fabric.add_node(probe, "server");
  }

  void watch(const std::string& robot)
  {
    planner.add_robot(robot, 0);
    fabric.subscribe(probe, goal_topic(robot), "PathMsg",
      [this, robot](const messaging::Envelope& e)
      {
        seen.emplace_back("path:" + robot, nlohmann::json::parse(e.payload_string()));
      });
    fabric.subscribe(probe, cancel_topic(robot), "Flag",
      [this, robot](const messaging::Envelope& e)
      {
        seen.emplace_back("cancel:" + robot, nlohmann::json::parse(e.payload_string()));
      });
    fabric.subscribe(probe, goal_status_topic(robot), "GoalStatus",
      [this, robot](const messaging::Envelope& e)
      {
        seen.emplace_back("status:" + robot, nlohmann::json::parse(e.payload_string()));
      });
  }

  void add(const std::string& robot, CellId cell)
  {
    watch(robot);
    // Robots report their own cell through poses; none run here.
    const_cast<RobotTrack&>(planner.robot(robot)).cell = cell;
  }

  void settle() { loop.run_until(loop.now() + seconds_to_ns(1.0)); }
};

TEST_F(GlobalPlannerTest, ThreeIndependentShortestPaths)
{
  add("Robot1", 0);
  add("Robot2", 7);
  add("Robot3", 56);
  const auto p1 = planner.assign_goal("Robot1", 63);
  const auto p2 = planner.assign_goal("Robot2", 56);
  const auto p3 = planner.assign_goal("Robot3", 7);
  settle();
  ASSERT_TRUE(p1 && p2 && p3);
  const auto mask = oracle::blocked_mask(planner.map());
  EXPECT_EQ(static_cast<int>(p1->cells.size()), *oracle::bfs_distance(8, 8, mask, 0, 63) + 1);
  EXPECT_EQ(static_cast<int>(p2->cells.size()), *oracle::bfs_distance(8, 8, mask, 7, 56) + 1);
  EXPECT_EQ(static_cast<int>(p3->cells.size()), *oracle::bfs_distance(8, 8, mask, 56, 7) + 1);
  EXPECT_EQ(seen.size(), 3u);
}

TEST_F(GlobalPlannerTest, GoalOnCurrentCellIsSingleCellPath)
{
  add("Robot1", 9);
  const auto path = planner.assign_goal("Robot1", 9);
  ASSERT_TRUE(path);
  EXPECT_EQ(path->cells, std::vector<CellId>{9});
}

TEST_F(GlobalPlannerTest, BlockedGoalIsInvalidGoal)
{
  add("Robot1", 0);
  planner.block_cell(20);
  EXPECT_EQ(code_of([&] { planner.assign_goal("Robot1", 20); }), ErrorCode::InvalidGoal);
}

TEST_F(GlobalPlannerTest, OccupiedCellRejected)
{
  add("Robot1", 12);
  const auto version = planner.map().version();
  EXPECT_EQ(code_of([&] { planner.block_cell(12); }), ErrorCode::OccupiedCell);
  EXPECT_EQ(planner.map().version(), version);
  EXPECT_FALSE(planner.map().blocked(12));
}

TEST_F(GlobalPlannerTest, OnlyAffectedRobotReplans)
{
  add("Robot1", 0);
  add("Robot2", 16);
  add("Robot3", 56);
  planner.assign_goal("Robot1", 7);
  planner.assign_goal("Robot2", 23);
  planner.assign_goal("Robot3", 63);
  settle();
  seen.clear();

  // Oracle: the cell lies on exactly one published path.
  const CellId cell = 19;
  std::vector<std::string> crossing;
  for (const auto& name : planner.robots())
  {
    const auto& path = planner.robot(name).path;
    if (std::find(path.begin(), path.end(), cell) != path.end())
      crossing.push_back(name);
  }
  ASSERT_EQ(crossing, std::vector<std::string>{"Robot2"});

  planner.block_cell(cell);
  settle();
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0].first, "cancel:Robot2");
  EXPECT_EQ(seen[0].second["value"], 1);
  EXPECT_EQ(seen[1].first, "path:Robot2");
  const auto cells = seen[1].second["cells"].get<std::vector<CellId>>();
  EXPECT_EQ(std::find(cells.begin(), cells.end(), cell), cells.end());
  EXPECT_GT(seen[1].second["mapVersion"].get<std::uint64_t>(), 0u);
}

TEST_F(GlobalPlannerTest, ObstacleOffAllPathsPublishesNothing)
{
  add("Robot1", 0);
  planner.assign_goal("Robot1", 7);
  settle();
  seen.clear();
  planner.block_cell(60);
  settle();
  EXPECT_TRUE(seen.empty());
}

TEST_F(GlobalPlannerTest, SeveredGoalIsUnreachable)
{
  add("Robot1", 0);
  planner.assign_goal("Robot1", 63);
  settle();
  seen.clear();
  planner.block_cell(62);
  planner.block_cell(55);
  settle();
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0].first, "cancel:Robot1");
  EXPECT_EQ(seen[1].first, "status:Robot1");
  EXPECT_EQ(seen[1].second["status"], "unreachable");
  EXPECT_TRUE(planner.all_goals_resolved());
  EXPECT_EQ(planner.outcomes().back().status, "unreachable");
}

TEST_F(GlobalPlannerTest, BurstOfBlocksIsOneCycle)
{
  add("Robot1", 0);
  planner.assign_goal("Robot1", 7);
  settle();
  const auto cycles = planner.replan_cycles();
  planner.block_cell(3);
  loop.run_until(loop.now() + seconds_to_ns(0.01));
  planner.block_cell(4);
  loop.run_until(loop.now() + seconds_to_ns(0.01));
  planner.block_cell(40);
  settle();
  EXPECT_EQ(planner.replan_cycles(), cycles + 1);
}

TEST_F(GlobalPlannerTest, PublishedPathsNeverContainBlockedCells)
{
  add("Robot1", 0);
  add("Robot2", 63);
  std::map<std::uint64_t, std::set<CellId>> blocked_at{{0, {}}};
  std::set<CellId> current;
  fabric.subscribe(probe, kMapTopic, "MapMsg", [&](const messaging::Envelope& e)
    {
      const auto msg = decode<MapMsg>(e);
      if (!msg || msg->kind != "delta")
        return;
      if (msg->cell_blocked)
        current.insert(msg->cell);
      else
        current.erase(msg->cell);
      blocked_at[msg->version] = current;
    });
  std::mt19937 rng(11);
  for (int i = 0; i < 60; ++i)
  {
    const CellId cell = static_cast<CellId>(rng() % 64);
    try
    {
      if (rng() % 3 == 0)
        planner.unblock_cell(cell);
      else
        planner.block_cell(cell);
      planner.assign_goal(i % 2 ? "Robot1" : "Robot2", static_cast<CellId>(rng() % 64));
    }
    catch (const Error&)
    {
    }
    settle();
  }
  int checked = 0;
  for (const auto& [key, msg] : seen)
  {
    if (key.rfind("path:", 0) != 0)
      continue;
    const auto version = msg["mapVersion"].get<std::uint64_t>();
    ASSERT_TRUE(blocked_at.contains(version));
    for (const CellId cell : msg["cells"].get<std::vector<CellId>>())
      EXPECT_FALSE(blocked_at[version].contains(cell)) << "v" << version << " cell " << cell;
    ++checked;
  }
  EXPECT_GT(checked, 5);
}
