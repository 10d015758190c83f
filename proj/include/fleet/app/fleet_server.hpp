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

#include <fleet/app/sim_runner.hpp>
#include <fleet/net/ws.hpp>

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace fleet::app {

using messaging::Envelope;
using topology::NodeId;
using topology::TopicHandle;

struct ServerOptions
{
  Topology mode = Topology::Single;
  std::string host = "127.0.0.1";
  int console_port = 9090;
  int robot_port = 9010;
  /// Cloud mode only.
  int handshake_port = 9000;
  /// Flat "user:password" file added to the built-in fleet account.
  std::string accounts_file;
  /// Scripts run as in sim mode; robots listed here are simulated in-process.
  Scenario scenario;
  /// Virtual seconds per wall second.
  double speed = 1.0;
  double pose_period = 0.2;
};

/// Scenario served when none is given: the fig6 fleet and grid, no scripts,
/// running until stopped.
Scenario default_server_scenario();

/// Socket mode: runs the stack against the wall clock, serves the console
/// API and accepts remote robots. In cloud mode robots handshake over HTTP
/// first and may send a cloud config to provision.
class FleetServer
{
public:
  explicit FleetServer(ServerOptions options);
  ~FleetServer();

  FleetServer(const FleetServer&) = delete;
  FleetServer& operator=(const FleetServer&) = delete;

  /// Binds every port, throwing StartupError naming the port in use.
  void start();
  void stop();
  bool running() const { return _running; }

  int console_port() const;
  int robot_port() const;
  int handshake_port() const;

  /// One line per task set that came up, e.g. "console ready ws://...".
  std::vector<std::string> ready_lines() const;

  /// Event log so far.
  std::vector<nlohmann::json> events() const;

  /// Runs `fn` with the stack locked.
  template<typename Fn>
  auto with_runner(Fn&& fn)
  {
    std::lock_guard lock(_mutex);
    return fn(*_runner);
  }

private:
  struct RemoteRobot
  {
    std::string name;
    std::optional<net::ClientId> client;
    bool attached = false;
    std::map<std::string, TopicHandle> publishers;
    nlohmann::json last_pose;
  };

  void on_console_message(net::ClientId client, const std::string& text);
  void on_robot_open(net::ClientId client, const std::string& path);
  void on_robot_message(net::ClientId client, const std::string& text);
  void on_robot_close(net::ClientId client);
  void attach_robot(RemoteRobot& robot, const nlohmann::json& hello);
  void flush();
  void pump();
  void send_robot_error(net::ClientId client, const Error& error);
  void start_handshake();
  topology::CloudFabric* cloud();

  ServerOptions _options;
  mutable std::mutex _mutex;
  std::unique_ptr<SimRunner> _runner;
  std::unique_ptr<net::WsServer> _console;
  std::unique_ptr<net::WsServer> _robots_ws;
  std::unique_ptr<httplib::Server> _http;
  std::thread _http_thread;
  int _handshake_port = -1;
  std::thread _pump;
  std::atomic<bool> _running{false};
  std::vector<nlohmann::json> _pending;
  std::vector<nlohmann::json> _events;
  std::map<net::ClientId, std::string> _robot_clients;
  std::map<std::string, RemoteRobot> _remote;
  std::vector<std::string> _ready;
};

} // namespace fleet::app
