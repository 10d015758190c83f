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

#include <fleet/messaging/envelope.hpp>
#include <fleet/messaging/event_loop.hpp>
#include <fleet/messaging/link_model.hpp>

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace fleet::messaging {

struct NetworkOptions
{
  /// Fixed framing overhead charged to every envelope on the wire.
  std::size_t header_bytes = 64;

  /// Per-subscriber inbox bound; overflow drops the oldest envelope.
  std::size_t queue_capacity = 100;

  /// Handling delay added to every hop, including same-host hops.
  TimeNs processing_ns = 0;
};

struct LinkCounters
{
  std::uint64_t bytes = 0;
  std::uint64_t msgs = 0;
  std::uint64_t dropped_msgs = 0;
  std::uint64_t dropped_bytes = 0;
};

/// Traffic is accounted per directed host pair and topic.
struct TrafficKey
{
  std::string from_host;
  std::string to_host;
  std::string topic;

  auto operator<=>(const TrafficKey&) const = default;
};

struct Delivery
{
  TimeNs at = 0;
  std::string from;
  std::string to;
  Envelope envelope;
  std::size_t wire_bytes = 0;
};

/// Virtual transport. Endpoints are addressed by an opaque string and live on
/// a named host; envelopes between different hosts pay the link model, while
/// same-host envelopes only pay the processing delay.
class Network
{
public:
  using Handler = std::function<void(const Envelope&)>;

  Network(
    EventLoop& loop,
    std::uint64_t seed,
    LinkModel default_link = {},
    NetworkOptions options = {});

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  EventLoop& loop() { return _loop; }
  TimeNs now() const { return _loop.now(); }
  const NetworkOptions& options() const { return _options; }
  void set_header_bytes(std::size_t bytes) { _options.header_bytes = bytes; }

  /// Symmetric per-pair override of the default link model.
  void set_link(const std::string& a, const std::string& b, LinkModel model);
  const LinkModel& link(const std::string& from, const std::string& to) const;

  /// A downed link rejects sends with LinkDown and drops in-flight traffic.
  void set_link_up(const std::string& a, const std::string& b, bool up);
  bool link_up(const std::string& a, const std::string& b) const;

  void attach(const std::string& address, const std::string& host);
  void detach(const std::string& address);
  bool attached(const std::string& address) const;
  const std::string& host_of(const std::string& address) const;

  void add_handler(
    const std::string& address, const std::string& topic, Handler handler);
  void clear_handlers(const std::string& address, const std::string& topic);

  /// Transmits one envelope. Loss is silent; a downed link throws LinkDown
  /// after counting the drop.
  void send(
    const std::string& from, const std::string& to, const Envelope& envelope);

  /// Advances the clock to `now` and returns every envelope that reached its
  /// receiver meanwhile, in delivery order.
  std::vector<Delivery> deliver(TimeNs now);

  std::size_t wire_size(const Envelope& envelope) const
  {
    return envelope.payload_size() + _options.header_bytes;
  }

  const std::map<TrafficKey, LinkCounters>& traffic() const { return _traffic; }

  /// Totals for one directed host pair across all topics.
  LinkCounters link_totals(
    const std::string& from_host, const std::string& to_host) const;

  /// Bytes that arrived at `host` from any other host.
  std::uint64_t ingress_bytes(const std::string& host, bool data_only = false) const;

  /// Global ledger of every delivered wire byte.
  std::uint64_t ledger_bytes() const { return _ledger_bytes; }
  std::uint64_t ledger_messages() const { return _ledger_msgs; }
  std::uint64_t queue_drops(const std::string& address) const;

  /// Envelope-handling events (sends, dispatches, reframes) per endpoint.
  void count_event(const std::string& address, std::uint64_t n = 1);
  std::uint64_t events(const std::string& address) const;
  const std::map<std::string, std::uint64_t>& node_events() const
  {
    return _events;
  }
  std::uint64_t host_events(const std::string& host) const;

  /// When enabled every delivery is appended to delivery_log().
  void record_deliveries(bool enabled) { _record = enabled; }
  const std::vector<Delivery>& delivery_log() const { return _log; }

private:
  struct Endpoint
  {
    std::string host;
    std::map<std::string, std::vector<Handler>> handlers;
    std::map<std::string, std::deque<Envelope>> inbox;
    std::set<std::string> drain_scheduled;
    std::uint64_t queue_drops = 0;
    std::uint64_t generation = 0;
  };

  static std::pair<std::string, std::string> pair_key(
    const std::string& a, const std::string& b);

  void arrive(
    const std::string& from, const std::string& to, std::uint64_t generation,
    const Envelope& envelope, const TrafficKey& key, std::size_t wire);
  void drain(const std::string& address, const std::string& topic);

  EventLoop& _loop;
  std::mt19937_64 _rng;
  LinkModel _default_link;
  NetworkOptions _options;
  std::map<std::pair<std::string, std::string>, LinkModel> _links;
  std::set<std::pair<std::string, std::string>> _down;
  std::unordered_map<std::string, Endpoint> _endpoints;
  std::map<std::tuple<std::string, std::string, std::string>, TimeNs> _fifo;
  std::map<TrafficKey, LinkCounters> _traffic;
  std::map<std::string, std::uint64_t> _events;
  std::map<std::string, std::uint64_t> _host_events;
  std::uint64_t _ledger_bytes = 0;
  std::uint64_t _ledger_msgs = 0;
  std::uint64_t _detach_count = 0;
  bool _record = false;
  std::vector<Delivery> _log;
  std::vector<Delivery>* _collect = nullptr;
};

} // namespace fleet::messaging
