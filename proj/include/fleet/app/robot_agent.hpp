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

#include <fleet/net/ws.hpp>
#include <fleet/robot/robot_sim.hpp>
#include <fleet/topology/cloud_config.hpp>
#include <fleet/topology/fabric.hpp>

#include <chrono>
#include <memory>
#include <optional>
#include <string>

namespace fleet::app {

using messaging::Envelope;
using topology::NodeId;
using topology::TopicHandle;

struct AgentOptions
{
  std::string name = "Robot1";
  topology::Topology mode = topology::Topology::Single;
  std::string host = "127.0.0.1";
  int robot_port = 9010;
  int handshake_port = 9000;
  std::string user = "fleet";
  std::string password = "fleet";
  /// Cloud mode: handshake credentials come from here and the config is
  /// applied after connecting.
  std::optional<topology::CloudConfig> config;
  CellId start = 0;
  double speed = 1.0;
  int attempts = 5;
  std::chrono::milliseconds backoff{200};
  std::uint64_t seed = 1;
};

/// Robot process for socket mode: simulates one robot locally and bridges
/// its topics to the server over a websocket.
class RobotAgent
{
public:
  explicit RobotAgent(AgentOptions options);
  ~RobotAgent();

  RobotAgent(const RobotAgent&) = delete;
  RobotAgent& operator=(const RobotAgent&) = delete;

  /// Handshake (cloud), connect, provision and join. Retries with doubling
  /// backoff; throws ConnectFailed after the last attempt and AuthFailed
  /// without retrying.
  void connect();

  /// Runs against the wall clock for `seconds`, or until the server closes.
  void run_for(double seconds);

  bool connected() const;
  const nlohmann::json& config_report() const { return _report; }
  robot::RobotSim& robot() { return *_robot; }
  int attempts_made() const { return _attempts; }
  std::uint64_t frames_in() const { return _frames_in; }
  std::uint64_t frames_out() const { return _frames_out; }

private:
  std::string handshake();
  nlohmann::json expect(const std::string& type, std::chrono::milliseconds timeout);
  void handle(const nlohmann::json& frame);
  void forward(const std::string& topic, const std::string& type, const Envelope& envelope);

  AgentOptions _options;
  messaging::EventLoop _loop;
  std::unique_ptr<messaging::Network> _network;
  std::unique_ptr<topology::Fabric> _fabric;
  std::unique_ptr<robot::RobotSim> _robot;
  net::WsClient _ws;
  std::map<std::string, TopicHandle> _publishers;
  nlohmann::json _report;
  int _attempts = 0;
  std::uint64_t _frames_in = 0;
  std::uint64_t _frames_out = 0;
};

} // namespace fleet::app
