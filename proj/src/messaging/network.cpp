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
#include <fleet/errors.hpp>
#include <fleet/messaging/network.hpp>

#include <algorithm>
#include <cmath>

namespace fleet::messaging {

void LinkModel::validate() const
{
  if (!(base_latency >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "base_latency must be >= 0");
  if (!(bandwidth > 0.0))
    throw Error(ErrorCode::InvalidArgument, "bandwidth must be > 0");
  if (!(jitter >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "jitter must be >= 0");
  if (!(loss_rate >= 0.0 && loss_rate < 1.0))
    throw Error(ErrorCode::InvalidArgument, "loss_rate must be in [0, 1)");
}

TimeNs LinkModel::transit(std::size_t payload_bytes, double jitter_draw) const
{
  const double seconds = base_latency
    + static_cast<double>(payload_bytes) / bandwidth + jitter_draw;
  return seconds_to_ns(std::max(0.0, seconds));
}

//==============================================================================
Network::Network(
  EventLoop& loop,
  std::uint64_t seed,
  LinkModel default_link,
  NetworkOptions options)
: _loop(loop),
  _rng(seed),
  _default_link(default_link),
  _options(options)
{
  _default_link.validate();
}

std::pair<std::string, std::string> Network::pair_key(
  const std::string& a, const std::string& b)
{
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

void Network::set_link(
  const std::string& a, const std::string& b, LinkModel model)
{
  model.validate();
  _links[pair_key(a, b)] = model;
}

const LinkModel& Network::link(
  const std::string& from, const std::string& to) const
{
  const auto it = _links.find(pair_key(from, to));
  return it == _links.end() ? _default_link : it->second;
}

void Network::set_link_up(const std::string& a, const std::string& b, bool up)
{
  if (up)
    _down.erase(pair_key(a, b));
  else
    _down.insert(pair_key(a, b));
}

bool Network::link_up(const std::string& a, const std::string& b) const
{
  return !_down.contains(pair_key(a, b));
}

void Network::attach(const std::string& address, const std::string& host)
{
  auto& endpoint = _endpoints[address];
  endpoint.host = host;
  endpoint.generation = ++_detach_count;
}

void Network::detach(const std::string& address)
{
  _endpoints.erase(address);
}

bool Network::attached(const std::string& address) const
{
  return _endpoints.contains(address);
}

const std::string& Network::host_of(const std::string& address) const
{
  const auto it = _endpoints.find(address);
  if (it == _endpoints.end())
    throw Error(ErrorCode::InvalidArgument, "unknown endpoint " + address);
  return it->second.host;
}

void Network::add_handler(
  const std::string& address, const std::string& topic, Handler handler)
{
  const auto it = _endpoints.find(address);
  if (it == _endpoints.end())
    throw Error(ErrorCode::InvalidArgument, "unknown endpoint " + address);
  it->second.handlers[topic].push_back(std::move(handler));
}

void Network::clear_handlers(const std::string& address, const std::string& topic)
{
  const auto it = _endpoints.find(address);
  if (it != _endpoints.end())
    it->second.handlers.erase(topic);
}

void Network::send(
  const std::string& from, const std::string& to, const Envelope& envelope)
{
  const std::string& from_host = host_of(from);
  const auto to_it = _endpoints.find(to);
  if (to_it == _endpoints.end())
    throw Error(ErrorCode::LinkDown, "no endpoint " + to);
  const std::string& to_host = to_it->second.host;

  count_event(from);

  const TrafficKey key{from_host, to_host, envelope.topic};
  const std::size_t wire = wire_size(envelope);

  if (!link_up(from_host, to_host))
  {
    auto& counters = _traffic[key];
    ++counters.dropped_msgs;
    counters.dropped_bytes += wire;
    throw Error(ErrorCode::LinkDown, from_host + " -> " + to_host);
  }

  TimeNs transit = _options.processing_ns;
  if (from_host != to_host)
  {
    const LinkModel& model = link(from_host, to_host);
    double jitter_draw = 0.0;
    if (model.jitter > 0.0)
    {
      std::uniform_real_distribution<double> dist(-model.jitter, model.jitter);
      jitter_draw = dist(_rng);
    }
    if (model.loss_rate > 0.0)
    {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (coin(_rng) < model.loss_rate)
      {
        auto& counters = _traffic[key];
        ++counters.dropped_msgs;
        counters.dropped_bytes += wire;
        return;
      }
    }
    transit += model.transit(envelope.payload_size(), jitter_draw);
  }

  // Channels are FIFO, like the stream connections they stand in for.
  TimeNs at = _loop.now() + transit;
  auto& last = _fifo[{from, to, envelope.topic}];
  at = std::max(at, last);
  last = at;

  const std::uint64_t generation = to_it->second.generation;
  _loop.schedule_at(at, [this, from, to, generation, envelope, key, wire]()
    {
      arrive(from, to, generation, envelope, key, wire);
    });
}

void Network::arrive(
  const std::string& from, const std::string& to, std::uint64_t generation,
  const Envelope& envelope, const TrafficKey& key, std::size_t wire)
{
  auto& counters = _traffic[key];
  const auto it = _endpoints.find(to);
  if (it == _endpoints.end() || it->second.generation != generation
    || !link_up(key.from_host, key.to_host))
  {
    ++counters.dropped_msgs;
    counters.dropped_bytes += wire;
    return;
  }

  counters.bytes += wire;
  ++counters.msgs;
  _ledger_bytes += wire;
  ++_ledger_msgs;

  Delivery delivery{_loop.now(), from, to, envelope, wire};
  if (_collect)
    _collect->push_back(delivery);
  if (_record)
    _log.push_back(std::move(delivery));

  auto& endpoint = it->second;
  auto& queue = endpoint.inbox[envelope.topic];
  queue.push_back(envelope);
  if (queue.size() > _options.queue_capacity)
  {
    queue.pop_front();
    ++endpoint.queue_drops;
  }

  if (endpoint.drain_scheduled.insert(envelope.topic).second)
  {
    _loop.schedule_at(_loop.now(), [this, to, topic = envelope.topic]()
      {
        drain(to, topic);
      });
  }
}

void Network::drain(const std::string& address, const std::string& topic)
{
  auto it = _endpoints.find(address);
  if (it == _endpoints.end())
    return;
  it->second.drain_scheduled.erase(topic);

  while (true)
  {
    // Handlers may attach or detach endpoints, so look the endpoint up again
    // on every iteration.
    it = _endpoints.find(address);
    if (it == _endpoints.end())
      return;
    auto& queue = it->second.inbox[topic];
    if (queue.empty())
      return;

    Envelope envelope = std::move(queue.front());
    queue.pop_front();
    count_event(address);

    const auto handlers_it = it->second.handlers.find(topic);
    if (handlers_it == it->second.handlers.end())
      continue;
    const auto handlers = handlers_it->second;
    for (const auto& handler : handlers)
      handler(envelope);
  }
}

std::vector<Delivery> Network::deliver(TimeNs now)
{
  std::vector<Delivery> delivered;
  auto* previous = _collect;
  _collect = &delivered;
  _loop.run_until(now);
  _collect = previous;
  return delivered;
}

LinkCounters Network::link_totals(
  const std::string& from_host, const std::string& to_host) const
{
  LinkCounters total;
  for (const auto& [key, counters] : _traffic)
  {
    if (key.from_host != from_host || key.to_host != to_host)
      continue;
    total.bytes += counters.bytes;
    total.msgs += counters.msgs;
    total.dropped_msgs += counters.dropped_msgs;
    total.dropped_bytes += counters.dropped_bytes;
  }
  return total;
}

std::uint64_t Network::ingress_bytes(const std::string& host, bool data_only) const
{
  std::uint64_t total = 0;
  for (const auto& [key, counters] : _traffic)
  {
    if (key.to_host != host || key.from_host == host)
      continue;
    if (data_only && is_control_topic(key.topic))
      continue;
    total += counters.bytes;
  }
  return total;
}

std::uint64_t Network::queue_drops(const std::string& address) const
{
  const auto it = _endpoints.find(address);
  return it == _endpoints.end() ? 0 : it->second.queue_drops;
}

void Network::count_event(const std::string& address, std::uint64_t n)
{
  _events[address] += n;
  const auto it = _endpoints.find(address);
  if (it != _endpoints.end())
    _host_events[it->second.host] += n;
}

std::uint64_t Network::events(const std::string& address) const
{
  const auto it = _events.find(address);
  return it == _events.end() ? 0 : it->second;
}

std::uint64_t Network::host_events(const std::string& host) const
{
  const auto it = _host_events.find(host);
  return it == _host_events.end() ? 0 : it->second;
}

} // namespace fleet::messaging
