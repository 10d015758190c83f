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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace fleet::net {

using ClientId = std::uint64_t;

/// Text-frame websocket server on one IO thread. Handlers run on that
/// thread; send() and broadcast() may be called from anywhere.
class WsServer
{
public:
  using OpenHandler = std::function<void(ClientId, const std::string& path)>;
  using MessageHandler = std::function<void(ClientId, const std::string& text)>;
  using CloseHandler = std::function<void(ClientId)>;

  /// Binds immediately; port 0 picks a free port. Throws StartupError naming
  /// the port when it cannot be bound.
  WsServer(const std::string& address, int port);
  ~WsServer();

  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  int port() const;

  void on_open(OpenHandler handler) { _on_open = std::move(handler); }
  void on_message(MessageHandler handler) { _on_message = std::move(handler); }
  void on_close(CloseHandler handler) { _on_close = std::move(handler); }

  void start();
  void stop();

  void send(ClientId client, std::string text);
  void broadcast(const std::string& text);
  void close(ClientId client);
  std::size_t clients() const;

private:
  struct Impl;
  friend struct Impl;
  std::unique_ptr<Impl> _impl;
  OpenHandler _on_open;
  MessageHandler _on_message;
  CloseHandler _on_close;
};

/// Blocking websocket client with a background reader.
class WsClient
{
public:
  WsClient();
  ~WsClient();

  WsClient(const WsClient&) = delete;
  WsClient& operator=(const WsClient&) = delete;

  /// Throws ConnectFailed.
  void connect(const std::string& host, int port, const std::string& path);

  /// Accepts "ws://host:port/path".
  void connect(const std::string& url);

  bool connected() const;
  void send(const std::string& text);

  /// Next received frame, or nullopt after `timeout` or once closed and
  /// drained.
  std::optional<std::string> receive(std::chrono::milliseconds timeout);

  void close();

private:
  struct Impl;
  std::unique_ptr<Impl> _impl;
};

} // namespace fleet::net
