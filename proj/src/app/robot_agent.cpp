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
#include <fleet/app/robot_agent.hpp>

#include <fleet/errors.hpp>

#include <httplib.h>

#include <thread>

namespace fleet::app {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

RobotAgent::RobotAgent(AgentOptions options) : _options(std::move(options))
{
  if (_options.config)
  {
    _options.name = _options.config->robot_id;
    _options.user = _options.config->user_id;
    _options.password = _options.config->password;
  }
  if (_options.name.empty())
    throw Error(ErrorCode::InvalidConfig, "robot name is empty");
  if (_options.attempts < 1)
    throw Error(ErrorCode::InvalidArgument, "attempts must be at least 1");
}

RobotAgent::~RobotAgent()
{
  _ws.close();
}

bool RobotAgent::connected() const
{
  return _ws.connected();
}

std::string RobotAgent::handshake()
{
  httplib::Client client(_options.host, _options.handshake_port);
  client.set_connection_timeout(std::chrono::seconds(2));
  topology::HandshakeRequest request;
  request.url = "http://" + _options.host + ":" + std::to_string(_options.handshake_port) + "/";
  request.user_id = _options.user;
  request.password = _options.password;
  request.robot_id = _options.name;
  const auto res = client.Post("/", request.to_json().dump(), "application/json");
  if (!res)
    throw Error(ErrorCode::ConnectFailed, "no handshake server at " + request.url);
  json body;
  try
  {
    body = json::parse(res->body);
  }
  catch (const json::exception&)
  {
    throw Error(ErrorCode::ConnectFailed, "handshake reply is not JSON");
  }
  if (res->status == 401)
    throw Error(ErrorCode::AuthFailed, body.value("detail", std::string()));
  if (res->status != 200)
    throw Error(ErrorCode::ConnectFailed, body.value("error", std::string()) + ": "
      + body.value("detail", std::string()));
  return body.at("url").get<std::string>();
}

json RobotAgent::expect(const std::string& type, std::chrono::milliseconds timeout)
{
  const auto deadline = Clock::now() + timeout;
  while (Clock::now() < deadline)
  {
    const auto text = _ws.receive(std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now()));
    if (!text)
      break;
    const json frame = json::parse(*text);
    const std::string got = frame.value("type", "");
    if (got == type)
      return frame;
    if (got == "error")
    {
      const std::string code = frame.value("error", "");
      const auto parsed = parse_error_code(code);
      throw Error(parsed.value_or(ErrorCode::ConnectFailed), frame.value("detail", code));
    }
    handle(frame);
  }
  throw Error(ErrorCode::ConnectFailed, "server did not send '" + type + "'");
}

void RobotAgent::connect()
{
  auto delay = _options.backoff;
  for (_attempts = 1;; ++_attempts)
  {
    try
    {
      if (_options.mode == topology::Topology::Cloud)
        _ws.connect(handshake());
      else
        _ws.connect(_options.host, _options.robot_port, "/" + _options.name);
      expect("connected", std::chrono::seconds(5));
      break;
    }
    catch (const Error& e)
    {
      _ws.close();
      const bool retry = e.code() == ErrorCode::ConnectFailed;
      if (!retry || _attempts >= _options.attempts)
        throw Error(e.code(), e.detail() + " (after " + std::to_string(_attempts)
          + " attempt" + (_attempts == 1 ? "" : "s") + ")");
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }

  if (_options.config)
  {
    _ws.send(json{{"type", "config"}, {"config", _options.config->to_json()}}.dump());
    _report = expect("config_report", std::chrono::seconds(5)).at("report");
  }
  _ws.send(json{{"type", "hello"}, {"start", _options.start}}.dump());
  const json welcome = expect("welcome", std::chrono::seconds(5));

  planner::GridMap map;
  map.apply(MapMsg::from_json(welcome.at("map")));
  _network = std::make_unique<messaging::Network>(_loop, _options.seed);
  _fabric = topology::make_fabric(topology::Topology::Single, *_network, _options.name);
  robot::RobotParams params;
  params.name = _options.name;
  params.start = _options.start;
  params.speed = _options.speed;
  params.seed = _options.seed;
  _robot = std::make_unique<robot::RobotSim>(*_fabric, params, map);

  const NodeId bridge{_options.name, "rce_client", _options.name};
  _fabric->add_node(bridge, _options.name);
  _publishers[goal_topic(_options.name)] =
    _fabric->advertise(bridge, goal_topic(_options.name), "PathMsg");
  _publishers[cancel_topic(_options.name)] =
    _fabric->advertise(bridge, cancel_topic(_options.name), "Flag");
  _publishers[kMapTopic] = _fabric->advertise(bridge, kMapTopic, "MapMsg");
  for (const auto& [topic, type] : {std::pair<std::string, std::string>{
         pose_topic(_options.name), "PoseMsg"},
       {obstacle_topic(_options.name), "ObstacleReport"}})
  {
    _fabric->subscribe(bridge, topic, type,
      [this, topic, type](const Envelope& envelope) { forward(topic, type, envelope); });
  }
  _robot->start();
}

void RobotAgent::forward(const std::string& topic, const std::string& type,
  const Envelope& envelope)
{
  if (!_ws.connected())
    return;
  try
  {
    _ws.send(json{{"type", "publish"}, {"topic", topic}, {"msgType", type},
      {"payload", json::parse(envelope.payload_string())}}.dump());
    ++_frames_out;
  }
  catch (const std::exception&)
  {
  }
}

void RobotAgent::handle(const json& frame)
{
  if (frame.value("type", "") != "publish" || !_robot)
    return;
  const auto handle = _publishers.find(frame.value("topic", ""));
  if (handle == _publishers.end())
    return;
  ++_frames_in;
  _fabric->publish(handle->second, messaging::make_payload(frame.at("payload").dump()));
}

void RobotAgent::run_for(double seconds)
{
  if (!_robot)
    throw Error(ErrorCode::NotConnected, "connect() first");
  const auto start = Clock::now();
  const auto origin = _loop.now();
  while (_ws.connected())
  {
    const double wall = std::chrono::duration<double>(Clock::now() - start).count();
    if (wall >= seconds)
      break;
    while (const auto text = _ws.receive(std::chrono::milliseconds(0)))
    {
      try
      {
        handle(json::parse(*text));
      }
      catch (const json::exception&)
      {
      }
    }
    _loop.run_until(origin + messaging::seconds_to_ns(wall));
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
}

} // namespace fleet::app
