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
#include <fleet/app/fleet_server.hpp>

#include <fleet/app/console_api.hpp>
#include <fleet/errors.hpp>

#include <httplib.h>

#include <chrono>
#include <limits>

namespace fleet::app {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

Scenario default_server_scenario()
{
  Scenario s = fig6_scenario();
  s.name = "server";
  s.goals.clear();
  s.obstacles.clear();
  s.duration = 1e7;
  return s;
}

FleetServer::FleetServer(ServerOptions options) : _options(std::move(options))
{
  _options.scenario.validate();
  if (_options.speed <= 0)
    throw Error(ErrorCode::InvalidConfig, "speed must be positive");
}

FleetServer::~FleetServer()
{
  stop();
}

int FleetServer::console_port() const
{
  return _console ? _console->port() : -1;
}

int FleetServer::robot_port() const
{
  return _robots_ws ? _robots_ws->port() : -1;
}

int FleetServer::handshake_port() const
{
  return _handshake_port;
}

std::vector<std::string> FleetServer::ready_lines() const
{
  std::lock_guard lock(_mutex);
  return _ready;
}

std::vector<json> FleetServer::events() const
{
  std::lock_guard lock(_mutex);
  return _events;
}

topology::CloudFabric* FleetServer::cloud()
{
  return dynamic_cast<topology::CloudFabric*>(&_runner->fabric());
}

void FleetServer::start()
{
  if (_running)
    return;
  _console = std::make_unique<net::WsServer>(_options.host, _options.console_port);
  _robots_ws = std::make_unique<net::WsServer>(_options.host, _options.robot_port);
  if (_options.mode == Topology::Cloud)
  {
    _http = std::make_unique<httplib::Server>();
    const bool bound = _options.handshake_port == 0
      ? (_handshake_port = _http->bind_to_any_port(_options.host)) > 0
      : _http->bind_to_port(_options.host, _options.handshake_port);
    if (!bound)
    {
      _http.reset();
      throw Error(ErrorCode::StartupError, "cannot listen on " + _options.host + ":"
        + std::to_string(_options.handshake_port));
    }
    if (_options.handshake_port != 0)
      _handshake_port = _options.handshake_port;
  }

  _runner = std::make_unique<SimRunner>(_options.scenario, _options.mode);
  topology::CloudOptions cloud_options;
  cloud_options.handshake_port = _handshake_port;
  cloud_options.ws_port = _robots_ws->port();
  _runner->set_cloud_options(cloud_options);
  _runner->set_observer([this](const json& event) { _pending.push_back(event); });
  {
    std::lock_guard lock(_mutex);
    _runner->prepare();
    if (auto* c = cloud(); c && !_options.accounts_file.empty())
      c->system().load_accounts(_options.accounts_file);
    flush();
  }

  _console->on_open([this](net::ClientId client, const std::string&)
    {
      std::lock_guard lock(_mutex);
      _console->send(client, console_snapshot(*_runner).dump());
      for (const auto& pose : console_poses(*_runner))
        _console->send(client, pose.dump());
    });
  _console->on_message([this](net::ClientId client, const std::string& text)
    {
      on_console_message(client, text);
    });
  _robots_ws->on_open([this](net::ClientId client, const std::string& path)
    {
      on_robot_open(client, path);
    });
  _robots_ws->on_message([this](net::ClientId client, const std::string& text)
    {
      on_robot_message(client, text);
    });
  _robots_ws->on_close([this](net::ClientId client) { on_robot_close(client); });

  _console->start();
  _robots_ws->start();
  const std::string mode(topology::to_string(_options.mode));
  const std::string base = _options.host + ":";
  _ready.push_back("planner ready mode=" + mode + " robots="
    + std::to_string(_options.scenario.robots.size()));
  if (_http)
  {
    start_handshake();
    _ready.push_back("master ready http://" + base + std::to_string(_handshake_port));
    _ready.push_back("robot endpoint ready ws://" + base + std::to_string(robot_port()));
    _ready.push_back("container " + cloud()->ctag() + " running");
  }
  else
  {
    _ready.push_back("robot endpoint ready ws://" + base + std::to_string(robot_port()));
  }
  _ready.push_back("console ready ws://" + base + std::to_string(console_port()));

  _running = true;
  _pump = std::thread([this]() { pump(); });
}

void FleetServer::start_handshake()
{
  const auto handle = [this](const httplib::Request& req, httplib::Response& res)
  {
    try
    {
      json body;
      try
      {
        body = json::parse(req.body);
      }
      catch (const json::exception&)
      {
        throw Error(ErrorCode::InvalidConfig, "handshake body is not JSON");
      }
      topology::HandshakeRequest request;
      try
      {
        request = topology::HandshakeRequest::from_json(body);
      }
      catch (const json::exception&)
      {
        throw Error(ErrorCode::InvalidConfig, "handshake needs userID, password, robotID");
      }
      std::lock_guard lock(_mutex);
      auto response = cloud()->system().handshake(request, request.robot_id);
      const auto url = topology::parse_url(response.url);
      response.url = "ws://" + _options.host + ":" + std::to_string(url.port) + url.path;
      flush();
      res.set_content(response.to_json().dump(), "application/json");
    }
    catch (const Error& e)
    {
      res.status = e.code() == ErrorCode::AuthFailed ? 401
        : e.code() == ErrorCode::AlreadyConnected ? 409 : 400;
      res.set_content(json{{"error", std::string(to_string(e.code()))},
        {"detail", e.detail()}}.dump(), "application/json");
    }
  };
  _http->Post("/", handle);
  _http->Post("/handshake", handle);
  _http_thread = std::thread([this]() { _http->listen_after_bind(); });
}

void FleetServer::stop()
{
  if (!_running.exchange(false))
    return;
  if (_pump.joinable())
    _pump.join();
  if (_http)
    _http->stop();
  if (_http_thread.joinable())
    _http_thread.join();
  _console->stop();
  _robots_ws->stop();
}

void FleetServer::flush()
{
  for (auto& event : _pending)
  {
    for (const auto& msg : console_messages(event))
      _console->broadcast(msg.dump());
    _events.push_back(std::move(event));
  }
  _pending.clear();
}

void FleetServer::pump()
{
  const auto start = Clock::now();
  const double origin = [this]()
  {
    std::lock_guard lock(_mutex);
    return _runner->now();
  }();
  double next_pose = 0.0;
  while (_running)
  {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    const double wall = std::chrono::duration<double>(Clock::now() - start).count();
    std::lock_guard lock(_mutex);
    _runner->advance_to(origin + wall * _options.speed);
    flush();
    if (wall >= next_pose)
    {
      next_pose = wall + _options.pose_period;
      for (const auto& pose : console_poses(*_runner))
        _console->broadcast(pose.dump());
      for (const auto& [name, robot] : _remote)
      {
        if (!robot.last_pose.is_null())
          _console->broadcast(robot.last_pose.dump());
      }
    }
  }
}

void FleetServer::on_console_message(net::ClientId client, const std::string& text)
{
  json reply;
  std::lock_guard lock(_mutex);
  try
  {
    reply = handle_console_command(*_runner, json::parse(text));
  }
  catch (const json::exception&)
  {
    reply = {{"type", "error"}, {"error", "InvalidArgument"},
      {"detail", "command is not JSON"}};
  }
  _console->send(client, reply.dump());
  flush();
}

void FleetServer::send_robot_error(net::ClientId client, const Error& error)
{
  _robots_ws->send(client, json{{"type", "error"},
    {"error", std::string(to_string(error.code()))}, {"detail", error.detail()}}.dump());
}

void FleetServer::on_robot_open(net::ClientId client, const std::string& path)
{
  std::string name = path;
  while (!name.empty() && name.front() == '/')
    name.erase(name.begin());
  std::lock_guard lock(_mutex);
  try
  {
    if (name.empty() || name.find('/') != std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "connect to /<robotID>");
    if (auto* c = cloud(); c && !c->system().connected(name))
      throw Error(ErrorCode::NotConnected, name + " has not completed the handshake");
    for (const auto& spec : _options.scenario.robots)
    {
      if (spec.name == name)
        throw Error(ErrorCode::NameConflict, name + " is simulated by the server");
    }
    auto& robot = _remote[name];
    if (robot.client)
      throw Error(ErrorCode::AlreadyConnected, name);
    robot.name = name;
    robot.client = client;
    _robot_clients[client] = name;
    _robots_ws->send(client, json{{"type", "connected"}, {"robot", name},
      {"mode", std::string(topology::to_string(_options.mode))}}.dump());
  }
  catch (const Error& e)
  {
    send_robot_error(client, e);
    _robots_ws->close(client);
  }
}

void FleetServer::on_robot_close(net::ClientId client)
{
  std::lock_guard lock(_mutex);
  const auto it = _robot_clients.find(client);
  if (it == _robot_clients.end())
    return;
  _remote[it->second].client.reset();
  _robot_clients.erase(it);
}

void FleetServer::attach_robot(RemoteRobot& robot, const json& hello)
{
  const CellId start = hello.at("start").get<CellId>();
  _runner->planner().map().require_cell(start);
  const NodeId node{robot.name, "rce_bridge", robot.name};
  auto& fabric = _runner->fabric();
  if (!robot.attached)
  {
    fabric.add_node(node, robot.name);
    robot.publishers[pose_topic(robot.name)] =
      fabric.advertise(node, pose_topic(robot.name), "PoseMsg");
    robot.publishers[obstacle_topic(robot.name)] =
      fabric.advertise(node, obstacle_topic(robot.name), "ObstacleReport");
    const std::string name = robot.name;
    const auto forward = [this, name](const std::string& topic, const std::string& type)
    {
      return [this, name, topic, type](const Envelope& envelope)
      {
        const auto& r = _remote[name];
        if (!r.client)
          return;
        json payload;
        try
        {
          payload = json::parse(envelope.payload_string());
        }
        catch (const json::exception&)
        {
          return;
        }
        _robots_ws->send(*r.client, json{{"type", "publish"}, {"topic", topic},
          {"msgType", type}, {"payload", payload}}.dump());
      };
    };
    fabric.subscribe(node, goal_topic(name), "PathMsg", forward(goal_topic(name), "PathMsg"));
    fabric.subscribe(node, cancel_topic(name), "Flag", forward(cancel_topic(name), "Flag"));
    fabric.subscribe(node, kMapTopic, "MapMsg", forward(kMapTopic, "MapMsg"));
    _runner->planner().add_robot(robot.name, start);
    robot.attached = true;
  }
  _robots_ws->send(*robot.client, json{{"type", "welcome"}, {"robot", robot.name},
    {"map", _runner->planner().map().snapshot().to_json()}}.dump());
}

void FleetServer::on_robot_message(net::ClientId client, const std::string& text)
{
  std::lock_guard lock(_mutex);
  const auto it = _robot_clients.find(client);
  if (it == _robot_clients.end())
    return;
  RemoteRobot& robot = _remote[it->second];
  try
  {
    json msg;
    try
    {
      msg = json::parse(text);
    }
    catch (const json::exception&)
    {
      throw Error(ErrorCode::InvalidArgument, "frame is not JSON");
    }
    const std::string type = msg.value("type", "");
    if (type == "config")
    {
      auto* c = cloud();
      if (!c)
        throw Error(ErrorCode::InvalidArgument, "configs apply in cloud mode only");
      const auto config = topology::CloudConfig::from_json(msg.at("config"));
      const auto report = c->system().apply_config(config);
      _robots_ws->send(client, json{{"type", "config_report"},
        {"report", report.to_json()}}.dump());
    }
    else if (type == "hello")
    {
      attach_robot(robot, msg);
    }
    else if (type == "publish")
    {
      const auto handle = robot.publishers.find(msg.at("topic").get<std::string>());
      if (handle == robot.publishers.end())
        throw Error(ErrorCode::InvalidArgument, "robot may not publish on "
          + msg.at("topic").get<std::string>());
      const json& payload = msg.at("payload");
      _runner->fabric().publish(handle->second, messaging::make_payload(payload.dump()));
      if (handle->first == pose_topic(robot.name))
      {
        robot.last_pose = {{"type", "pose"}, {"robot", robot.name},
          {"x", payload.value("x", 0.0)}, {"y", payload.value("y", 0.0)},
          {"theta", payload.value("theta", 0.0)}, {"cell", payload.value("cell", -1)},
          {"status", "remote"}};
      }
    }
    else
    {
      throw Error(ErrorCode::InvalidArgument, "unknown frame type '" + type + "'");
    }
  }
  catch (const Error& e)
  {
    send_robot_error(client, e);
  }
  catch (const json::exception& e)
  {
    send_robot_error(client, Error(ErrorCode::InvalidArgument, e.what()));
  }
  flush();
}

} // namespace fleet::app
