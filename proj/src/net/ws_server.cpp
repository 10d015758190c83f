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

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <map>

namespace fleet::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Session : public std::enable_shared_from_this<Session>
{
public:
  Session(tcp::socket socket, ClientId id) : _ws(std::move(socket)), _id(id) {}

  ClientId id() const { return _id; }

  std::function<void(ClientId, const std::string&)> opened;
  std::function<void(ClientId, const std::string&)> received;
  std::function<void(ClientId)> closed;

  void run()
  {
    http::async_read(_ws.next_layer(), _buffer, _request,
      [self = shared_from_this()](beast::error_code ec, std::size_t)
      {
        if (ec || !websocket::is_upgrade(self->_request))
          return self->finish();
        self->_path = std::string(self->_request.target());
        self->_ws.async_accept(self->_request,
          [self](beast::error_code ec)
          {
            if (ec)
              return self->finish();
            self->_open = true;
            self->_buffer.consume(self->_buffer.size());
            if (self->opened)
              self->opened(self->_id, self->_path);
            self->read();
          });
      });
  }

  void send(std::string text)
  {
    asio::post(_ws.get_executor(),
      [self = shared_from_this(), text = std::move(text)]() mutable
      {
        if (!self->_open)
          return;
        self->_queue.push_back(std::move(text));
        if (self->_queue.size() == 1)
          self->write();
      });
  }

  void close()
  {
    asio::post(_ws.get_executor(), [self = shared_from_this()]()
      {
        if (!self->_open)
          return;
        self->_ws.async_close(websocket::close_code::normal,
          [self](beast::error_code) { self->finish(); });
      });
  }

  void shutdown()
  {
    beast::error_code ec;
    _ws.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    _ws.next_layer().close(ec);
  }

private:
  void read()
  {
    _ws.async_read(_buffer, [self = shared_from_this()](beast::error_code ec, std::size_t)
      {
        if (ec)
          return self->finish();
        std::string text = beast::buffers_to_string(self->_buffer.data());
        self->_buffer.consume(self->_buffer.size());
        if (self->received)
          self->received(self->_id, text);
        self->read();
      });
  }

  void write()
  {
    _ws.text(true);
    _ws.async_write(asio::buffer(_queue.front()),
      [self = shared_from_this()](beast::error_code ec, std::size_t)
      {
        if (ec)
          return self->finish();
        self->_queue.pop_front();
        if (!self->_queue.empty())
          self->write();
      });
  }

  void finish()
  {
    _open = false;
    _queue.clear();
    if (_finished)
      return;
    _finished = true;
    if (closed)
      closed(_id);
  }

  websocket::stream<tcp::socket> _ws;
  ClientId _id;
  beast::flat_buffer _buffer;
  http::request<http::string_body> _request;
  std::string _path;
  std::deque<std::string> _queue;
  bool _open = false;
  bool _finished = false;
};

} // namespace

struct WsServer::Impl
{
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::thread thread;
  mutable std::mutex mutex;
  std::map<ClientId, std::shared_ptr<Session>> sessions;
  ClientId next_id = 1;
  bool running = false;

  void accept(WsServer& server)
  {
    acceptor.async_accept([this, &server](beast::error_code ec, tcp::socket socket)
      {
        if (ec)
          return;
        std::shared_ptr<Session> session;
        {
          std::lock_guard lock(mutex);
          session = std::make_shared<Session>(std::move(socket), next_id++);
          sessions[session->id()] = session;
        }
        session->opened = [&server](ClientId id, const std::string& path)
        {
          if (server._on_open)
            server._on_open(id, path);
        };
        session->received = [&server](ClientId id, const std::string& text)
        {
          if (server._on_message)
            server._on_message(id, text);
        };
        session->closed = [this, &server](ClientId id)
        {
          {
            std::lock_guard lock(mutex);
            sessions.erase(id);
          }
          if (server._on_close)
            server._on_close(id);
        };
        session->run();
        accept(server);
      });
  }
};

WsServer::WsServer(const std::string& address, int port)
: _impl(std::make_unique<Impl>())
{
  try
  {
    const tcp::endpoint endpoint(asio::ip::make_address(address),
      static_cast<unsigned short>(port));
    _impl->acceptor.open(endpoint.protocol());
    _impl->acceptor.set_option(asio::socket_base::reuse_address(true));
    _impl->acceptor.bind(endpoint);
    _impl->acceptor.listen();
  }
  catch (const boost::system::system_error& e)
  {
    throw Error(ErrorCode::StartupError, "cannot listen on " + address + ":"
      + std::to_string(port) + " (" + e.code().message() + ")");
  }
}

WsServer::~WsServer()
{
  stop();
}

int WsServer::port() const
{
  return _impl->acceptor.local_endpoint().port();
}

void WsServer::start()
{
  if (_impl->running)
    return;
  _impl->running = true;
  _impl->accept(*this);
  _impl->thread = std::thread([this]() { _impl->io.run(); });
}

void WsServer::stop()
{
  if (!_impl->running)
    return;
  asio::post(_impl->io, [this]()
    {
      beast::error_code ec;
      _impl->acceptor.close(ec);
      std::map<ClientId, std::shared_ptr<Session>> sessions;
      {
        std::lock_guard lock(_impl->mutex);
        sessions = _impl->sessions;
      }
      for (auto& [id, session] : sessions)
        session->shutdown();
    });
  _impl->io.stop();
  if (_impl->thread.joinable())
    _impl->thread.join();
  std::lock_guard lock(_impl->mutex);
  _impl->sessions.clear();
  _impl->running = false;
}

void WsServer::send(ClientId client, std::string text)
{
  std::shared_ptr<Session> session;
  {
    std::lock_guard lock(_impl->mutex);
    const auto it = _impl->sessions.find(client);
    if (it == _impl->sessions.end())
      return;
    session = it->second;
  }
  session->send(std::move(text));
}

void WsServer::broadcast(const std::string& text)
{
  std::vector<std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lock(_impl->mutex);
    for (auto& [id, session] : _impl->sessions)
      sessions.push_back(session);
  }
  for (auto& session : sessions)
    session->send(text);
}

void WsServer::close(ClientId client)
{
  std::shared_ptr<Session> session;
  {
    std::lock_guard lock(_impl->mutex);
    const auto it = _impl->sessions.find(client);
    if (it == _impl->sessions.end())
      return;
    session = it->second;
  }
  session->close();
}

std::size_t WsServer::clients() const
{
  std::lock_guard lock(_impl->mutex);
  return _impl->sessions.size();
}

} // namespace fleet::net
