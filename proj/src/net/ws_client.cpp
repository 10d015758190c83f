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
#include <fleet/net/ws.hpp>

#include <fleet/errors.hpp>
#include <fleet/topology/cloud.hpp>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace fleet::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct WsClient::Impl
{
  asio::io_context io;
  std::optional<websocket::stream<tcp::socket>> ws;
  std::thread reader;
  std::mutex write_mutex;
  mutable std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::string> inbox;
  bool open = false;

  void read_loop()
  {
    beast::flat_buffer buffer;
    while (true)
    {
      beast::error_code ec;
      ws->read(buffer, ec);
      if (ec)
        break;
      std::lock_guard lock(mutex);
      inbox.push_back(beast::buffers_to_string(buffer.data()));
      buffer.consume(buffer.size());
      ready.notify_all();
    }
    std::lock_guard lock(mutex);
    open = false;
    ready.notify_all();
  }
};

WsClient::WsClient() : _impl(std::make_unique<Impl>()) {}

WsClient::~WsClient()
{
  close();
}

void WsClient::connect(const std::string& host, int port, const std::string& path)
{
  close();
  try
  {
    tcp::resolver resolver(_impl->io);
    const auto results = resolver.resolve(host, std::to_string(port));
    _impl->ws.emplace(_impl->io);
    asio::connect(_impl->ws->next_layer(), results);
    _impl->ws->handshake(host + ":" + std::to_string(port), path.empty() ? "/" : path);
    _impl->ws->text(true);
  }
  catch (const boost::system::system_error& e)
  {
    _impl->ws.reset();
    throw Error(ErrorCode::ConnectFailed, "ws://" + host + ":" + std::to_string(port)
      + path + ": " + e.code().message());
  }
  {
    std::lock_guard lock(_impl->mutex);
    _impl->open = true;
    _impl->inbox.clear();
  }
  _impl->reader = std::thread([this]() { _impl->read_loop(); });
}

void WsClient::connect(const std::string& url)
{
  const auto parsed = topology::parse_url(url);
  if (parsed.scheme != "ws" || parsed.host.empty() || parsed.port < 0)
    throw Error(ErrorCode::ConnectFailed, "not a ws:// URL with a port: " + url);
  connect(parsed.host, parsed.port, parsed.path.empty() ? "/" : parsed.path);
}

bool WsClient::connected() const
{
  std::lock_guard lock(_impl->mutex);
  return _impl->open;
}

void WsClient::send(const std::string& text)
{
  if (!connected())
    throw Error(ErrorCode::ConnectFailed, "websocket is not connected");
  std::lock_guard lock(_impl->write_mutex);
  beast::error_code ec;
  _impl->ws->write(asio::buffer(text), ec);
  if (ec)
    throw Error(ErrorCode::ConnectFailed, "websocket write failed: " + ec.message());
}

std::optional<std::string> WsClient::receive(std::chrono::milliseconds timeout)
{
  std::unique_lock lock(_impl->mutex);
  _impl->ready.wait_for(lock, timeout, [this]() { return !_impl->inbox.empty() || !_impl->open; });
  if (_impl->inbox.empty())
    return std::nullopt;
  std::string text = std::move(_impl->inbox.front());
  _impl->inbox.pop_front();
  return text;
}

void WsClient::close()
{
  if (_impl->ws)
  {
    beast::error_code ec;
    _impl->ws->next_layer().shutdown(tcp::socket::shutdown_both, ec);
    _impl->ws->next_layer().close(ec);
  }
  if (_impl->reader.joinable())
    _impl->reader.join();
  _impl->ws.reset();
  std::lock_guard lock(_impl->mutex);
  _impl->open = false;
}

} // namespace fleet::net
