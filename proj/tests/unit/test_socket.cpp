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
#include <fleet/app/console_api.hpp>
#include <fleet/app/fleet_server.hpp>
#include <fleet/app/robot_agent.hpp>
#include <fleet/errors.hpp>
#include <fleet/net/ws.hpp>

#include <gtest/gtest.h>

#include <chrono>
#include <thread>

using namespace fleet;
using namespace fleet::app;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

/// Reads frames until one of `type` satisfying `pred` arrives.
std::optional<json> wait_for(net::WsClient& client, const std::string& type,
  const std::function<bool(const json&)>& pred = {},
  std::chrono::milliseconds timeout = 5000ms)
{
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline)
  {
    const auto text = client.receive(50ms);
    if (!text)
      continue;
    const json frame = json::parse(*text);
    if (frame.value("type", "") == type && (!pred || pred(frame)))
      return frame;
  }
  return std::nullopt;
}

ServerOptions ephemeral(topology::Topology mode)
{
  ServerOptions options;
  options.mode = mode;
  options.console_port = 0;
  options.robot_port = 0;
  options.handshake_port = 0;
  options.scenario = default_server_scenario();
  options.speed = 4.0;
  return options;
}

} // namespace

TEST(ConsoleApi, BlockEventBecomesDelta)
{
  const auto msgs = console_messages(json{{"type", "block"}, {"cell", 26},
    {"changed", true}, {"version", 1}, {"source", "operator"}, {"t", 5}});
  ASSERT_EQ(msgs.size(), 2u);
  EXPECT_EQ(msgs[0]["type"], "map_delta");
  EXPECT_EQ(msgs[0]["cell"], 26);
  EXPECT_EQ(msgs[0]["blocked"], true);
  EXPECT_EQ(msgs[1]["type"], "event");
}

TEST(ConsoleApi, UnchangedBlockIsOnlyAnEvent)
{
  const auto msgs = console_messages(json{{"type", "block"}, {"cell", 26},
    {"changed", false}, {"version", 1}});
  ASSERT_EQ(msgs.size(), 1u);
  EXPECT_EQ(msgs[0]["type"], "event");
}

TEST(ConsoleApi, CommandsApplyAndReject)
{
  SimRunner runner(default_server_scenario());
  runner.prepare();
  auto reply = handle_console_command(runner, json{{"type", "block_cell"}, {"cell", 26}, {"id", 7}});
  EXPECT_EQ(reply["type"], "ack");
  EXPECT_EQ(reply["id"], 7);
  EXPECT_TRUE(runner.planner().map().blocked(26));

  reply = handle_console_command(runner, json{{"type", "block_cell"}, {"cell", 30}});
  EXPECT_EQ(reply["type"], "error");
  EXPECT_EQ(reply["error"], "OccupiedCell");

  reply = handle_console_command(runner, json{{"type", "assign_goal"}, {"robot", "Robot1"}, {"cell", 26}});
  EXPECT_EQ(reply["error"], "InvalidGoal");

  reply = handle_console_command(runner, json{{"type", "assign_goal"}, {"robot", "Robot1"}, {"cell", 24}});
  EXPECT_EQ(reply["type"], "ack");
  EXPECT_EQ(reply["reachable"], true);

  reply = handle_console_command(runner, json{{"type", "teleport"}, {"cell", 1}});
  EXPECT_EQ(reply["error"], "InvalidArgument");
  reply = handle_console_command(runner, json{{"type", "block_cell"}});
  EXPECT_EQ(reply["error"], "InvalidArgument");
}

TEST(ConsoleApi, SnapshotListsBlockedCells)
{
  auto s = default_server_scenario();
  s.blocked = {5, 9};
  SimRunner runner(s);
  runner.prepare();
  const auto snap = console_snapshot(runner);
  EXPECT_EQ(snap["type"], "map_snapshot");
  EXPECT_EQ(snap["blocked"], json::array({5, 9}));
  EXPECT_EQ(console_poses(runner).size(), 3u);
}

TEST(FleetServer, ConsoleRoundTrip)
{
  FleetServer server(ephemeral(topology::Topology::Single));
  server.start();
  net::WsClient console;
  console.connect("127.0.0.1", server.console_port(), "/");
  const auto snap = wait_for(console, "map_snapshot");
  ASSERT_TRUE(snap);
  EXPECT_EQ((*snap)["width"], 8);
  ASSERT_TRUE(wait_for(console, "pose"));

  console.send(json{{"type", "assign_goal"}, {"robot", "Robot1"}, {"cell", 24}, {"id", 1}}.dump());
  console.send(json{{"type", "block_cell"}, {"cell", 27}, {"id", 2}}.dump());
  const auto ack = wait_for(console, "ack", [](const json& f) { return f.value("id", 0) == 2; });
  ASSERT_TRUE(ack);
  const auto delta = wait_for(console, "map_delta");
  ASSERT_TRUE(delta);
  EXPECT_EQ((*delta)["cell"], 27);
  const auto path = wait_for(console, "path", [](const json& f)
    {
      for (const auto& c : f["cells"])
      {
        if (c == 27)
          return false;
      }
      return f["robot"] == "Robot1";
    });
  ASSERT_TRUE(path);

  console.send(json{{"type", "block_cell"}, {"cell", 56}, {"id", 3}}.dump());
  const auto err = wait_for(console, "error");
  ASSERT_TRUE(err);
  EXPECT_EQ((*err)["error"], "OccupiedCell");
  server.stop();
}

TEST(FleetServer, SecondInstanceOnSamePortFails)
{
  FleetServer first(ephemeral(topology::Topology::Single));
  first.start();
  auto options = ephemeral(topology::Topology::Single);
  options.console_port = first.console_port();
  FleetServer second(options);
  try
  {
    second.start();
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.code(), ErrorCode::StartupError);
    EXPECT_NE(e.detail().find(std::to_string(first.console_port())), std::string::npos);
  }
}

TEST(FleetServer, CloudModeReportsTaskSets)
{
  FleetServer server(ephemeral(topology::Topology::Cloud));
  server.start();
  const auto lines = server.ready_lines();
  const auto has = [&](const std::string& prefix)
  {
    return std::any_of(lines.begin(), lines.end(),
      [&](const std::string& l) { return l.rfind(prefix, 0) == 0; });
  };
  EXPECT_TRUE(has("master ready"));
  EXPECT_TRUE(has("robot endpoint ready"));
  EXPECT_TRUE(has("container fleet_ctr running"));
  EXPECT_TRUE(has("console ready"));
}

class RemoteRobotTest : public ::testing::TestWithParam<std::string>
{
};

TEST_P(RemoteRobotTest, RemoteRobotReachesGoal)
{
  const auto mode = topology::parse_topology(GetParam());
  FleetServer server(ephemeral(mode));
  server.start();

  AgentOptions options;
  options.name = "Robot4";
  options.mode = mode;
  options.robot_port = server.robot_port();
  options.handshake_port = server.handshake_port();
  options.start = 0;
  options.speed = 4.0;
  RobotAgent agent(options);
  agent.connect();
  agent.run_for(1.0);

  server.with_runner([](SimRunner& r) { return r.assign_goal("Robot4", 3); });
  agent.run_for(3.0);
  EXPECT_EQ(agent.robot().current_cell(), 3);
  EXPECT_GT(agent.frames_out(), 0u);
  const auto cell = server.with_runner(
    [](SimRunner& r) { return r.planner().robot("Robot4").cell; });
  EXPECT_EQ(cell, 3);
}

INSTANTIATE_TEST_SUITE_P(Modes, RemoteRobotTest, ::testing::Values("single", "multi", "cloud"));

TEST(RobotAgent, BadCredentialsFailWithoutRetry)
{
  FleetServer server(ephemeral(topology::Topology::Cloud));
  server.start();
  AgentOptions options;
  options.name = "Robot4";
  options.mode = topology::Topology::Cloud;
  options.handshake_port = server.handshake_port();
  options.password = "wrong";
  RobotAgent agent(options);
  try
  {
    agent.connect();
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.code(), ErrorCode::AuthFailed);
  }
  EXPECT_EQ(agent.attempts_made(), 1);
}

TEST(RobotAgent, UnreachableServerRetriesThenFails)
{
  int port = 0;
  {
    net::WsServer probe("127.0.0.1", 0);
    port = probe.port();
  }
  AgentOptions options;
  options.name = "Robot4";
  options.robot_port = port;
  options.attempts = 3;
  options.backoff = 20ms;
  RobotAgent agent(options);
  const auto start = std::chrono::steady_clock::now();
  try
  {
    agent.connect();
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.code(), ErrorCode::ConnectFailed);
  }
  EXPECT_EQ(agent.attempts_made(), 3);
  EXPECT_GE(std::chrono::steady_clock::now() - start, 60ms);
}

TEST(RobotAgent, CloudConfigProvisions)
{
  auto server_options = ephemeral(topology::Topology::Cloud);
  server_options.accounts_file = std::string(FLEET_DATA_DIR) + "/configs/accounts.txt";
  FleetServer server(server_options);
  server.start();
  AgentOptions options;
  options.mode = topology::Topology::Cloud;
  options.handshake_port = server.handshake_port();
  options.config = topology::CloudConfig::load(std::string(FLEET_DATA_DIR) + "/configs/robot1.config");
  options.config->url = "http://127.0.0.1:" + std::to_string(server.handshake_port()) + "/";
  options.start = 0;
  RobotAgent agent(options);
  agent.connect();
  const auto& report = agent.config_report();
  ASSERT_TRUE(report.is_object());
  const std::string dump = report.dump();
  EXPECT_NE(dump.find("cTag_01"), std::string::npos);
}
