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
#include <fleet/app/sim_runner.hpp>
#include <fleet/errors.hpp>

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace fleet;
using namespace fleet::app;
using nlohmann::json;

namespace {

std::vector<json> of_type(const std::vector<json>& events, const std::string& type,
  const std::string& robot = "")
{
  std::vector<json> out;
  for (const auto& e : events)
  {
    if (e.value("type", "") != type)
      continue;
    if (!robot.empty() && e.value("robot", "") != robot)
      continue;
    out.push_back(e);
  }
  return out;
}

bool contains(const json& cells, CellId cell)
{
  for (const auto& c : cells)
  {
    if (c.get<CellId>() == cell)
      return true;
  }
  return false;
}

} // namespace

TEST(Scenario, ParsesMinimalDocument)
{
  const auto s = Scenario::parse(R"({
    "seed": 3, "duration": 10,
    "robots": [{"name": "r1", "start": 0}],
    "goals": [{"t": 0, "robot": "r1", "cell": 7}]
  })");
  EXPECT_EQ(s.seed, 3u);
  ASSERT_EQ(s.robots.size(), 1u);
  EXPECT_EQ(s.goals[0].cell, 7);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(Scenario, SyntaxErrorCarriesPosition)
{
  try
  {
    Scenario::parse("{\n  \"seed\": 1,\n  oops\n}");
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Scenario, UnknownKeysWarn)
{
  const auto s = Scenario::parse(R"({"seed": 1, "robots": [], "weather": "rain"})");
  ASSERT_EQ(s.warnings.size(), 1u);
  EXPECT_NE(s.warnings[0].find("weather"), std::string::npos);
}

TEST(Scenario, ValidationRejectsBadInput)
{
  auto s = fig6_scenario();
  s.seed.reset();
  EXPECT_THROW(s.validate(), Error);
  s = fig6_scenario();
  s.goals.push_back(GoalEvent{1.0, "Nobody", 3});
  EXPECT_THROW(s.validate(), Error);
  s = fig6_scenario();
  s.robots[1].start = 64;
  EXPECT_THROW(s.validate(), Error);
  s = fig6_scenario();
  s.robots[1].name = "Robot1";
  EXPECT_THROW(s.validate(), Error);
}

TEST(Scenario, JsonRoundTrip)
{
  const auto s = fig6_scenario();
  const auto back = Scenario::from_json(s.to_json());
  EXPECT_EQ(back.to_json(), s.to_json());
}

TEST(Scenario, ShippedFig6MatchesBuiltin)
{
  const auto s = Scenario::load(std::string(FLEET_DATA_DIR) + "/scenarios/fig6.json");
  EXPECT_EQ(s.to_json(), fig6_scenario().to_json());
}

class Fig6Test : public ::testing::TestWithParam<std::string>
{
};

TEST_P(Fig6Test, OnlyAffectedRobotsReplan)
{
  SimRunner runner(fig6_scenario(), topology::parse_topology(GetParam()));
  const auto result = runner.run();
  const auto& events = result.events;

  for (const std::string robot : {"Robot1", "Robot2"})
  {
    const auto cancels = of_type(events, "cancel", robot);
    ASSERT_EQ(cancels.size(), 1u) << robot;
    EXPECT_GE(cancels[0]["t"].get<std::int64_t>(), 5'000'000'000);
    const auto paths = of_type(events, "path", robot);
    ASSERT_EQ(paths.size(), 2u) << robot;
    EXPECT_TRUE(contains(paths[0]["cells"], 26)) << robot;
    EXPECT_FALSE(contains(paths[1]["cells"], 26)) << robot;
    EXPECT_GE(paths[1]["t"].get<std::int64_t>(), cancels[0]["t"].get<std::int64_t>());
    EXPECT_GT(paths[1]["seq"].get<std::uint64_t>(), cancels[0]["seq"].get<std::uint64_t>());

    planner::GridMap map;
    map.block(26);
    const auto cells = paths[1]["cells"];
    const auto expected = oracle::bfs_distance(8, 8, oracle::blocked_mask(map),
      cells.front().get<int>(), cells.back().get<int>());
    ASSERT_TRUE(expected.has_value());
    EXPECT_EQ(static_cast<int>(cells.size()) - 1, *expected) << robot;
  }
  EXPECT_TRUE(of_type(events, "cancel", "Robot3").empty());
  EXPECT_EQ(of_type(events, "path", "Robot3").size(), 1u);

  EXPECT_TRUE(result.goals_resolved);
  EXPECT_EQ(result.final_cells.at("Robot1"), 24);
  EXPECT_EQ(result.final_cells.at("Robot2"), 58);
  EXPECT_EQ(result.final_cells.at("Robot3"), 63);
  for (const auto& e : of_type(events, "cell"))
    EXPECT_NE(e["cell"].get<CellId>(), 26);
}

INSTANTIATE_TEST_SUITE_P(Topologies, Fig6Test, ::testing::Values("single", "multi", "cloud"));

TEST(SimRunner, SameSeedSameLog)
{
  const auto a = SimRunner(fig6_scenario()).run();
  const auto b = SimRunner(fig6_scenario()).run();
  EXPECT_EQ(a.events_jsonl(), b.events_jsonl());
}

TEST(SimRunner, ReplayReproducesFinalCells)
{
  const auto result = SimRunner(fig6_scenario()).run();
  const auto path = std::filesystem::temp_directory_path() / "fleet_replay_events.jsonl";
  {
    std::ofstream out(path);
    out << result.events_jsonl();
  }
  const auto events = read_event_log(path.string());
  EXPECT_EQ(replay_final_cells(events), result.final_cells);
  std::filesystem::remove(path);
}

TEST(SimRunner, EventTimesStartAtZeroAndIncrease)
{
  const auto result = SimRunner(fig6_scenario()).run();
  ASSERT_FALSE(result.events.empty());
  EXPECT_EQ(result.events.front()["type"], "start");
  EXPECT_EQ(result.events.front()["t"], 0);
  std::int64_t last = 0;
  for (const auto& e : result.events)
  {
    const auto t = e["t"].get<std::int64_t>();
    EXPECT_GE(t, last);
    last = t;
  }
}

TEST(SimRunner, RejectedCommandIsLogged)
{
  SimRunner runner(fig6_scenario());
  runner.prepare();
  EXPECT_THROW(runner.block_cell(30), Error);
  runner.advance_to(1.0);
  const auto result = runner.finish();
  const auto rejected = of_type(result.events, "command_rejected");
  ASSERT_EQ(rejected.size(), 1u);
  EXPECT_EQ(rejected[0]["error"], "OccupiedCell");
}

TEST(SimRunner, UnreachableGoalCountsAsResolved)
{
  auto s = fig6_scenario();
  s.obstacles.clear();
  s.blocked = {55, 62};
  s.goals = {GoalEvent{0.0, "Robot3", 63}};
  const auto result = SimRunner(s).run();
  EXPECT_EQ(of_type(result.events, "goal_unreachable", "Robot3").size(), 1u);
  EXPECT_TRUE(result.goals_resolved);
  EXPECT_EQ(result.final_cells.at("Robot3"), 56);
}
