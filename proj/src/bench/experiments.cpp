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
#include <fleet/bench/experiments.hpp>

#include <fleet/errors.hpp>
#include <fleet/messages.hpp>

#include <cctype>
#include <memory>

namespace fleet::bench {

using messaging::EventLoop;
using messaging::Network;
using messaging::NetworkOptions;
using messaging::TimeNs;
using messaging::seconds_to_ns;
using topology::NodeId;

namespace {

struct Rig
{
  EventLoop loop;
  std::unique_ptr<Network> network;
  std::unique_ptr<topology::Fabric> fabric;

  Rig(Topology topology, const CommonOptions& options)
  {
    options.link.validate();
    NetworkOptions net_options;
    net_options.header_bytes = options.header_bytes;
    network = std::make_unique<Network>(loop, options.seed, options.link, net_options);
    fabric = topology::make_fabric(topology, *network, kHubHost);
  }

  void start()
  {
    fabric->start();
    loop.run_until(loop.now() + fabric->warmup());
  }
};

std::string robot_name(int index)
{
  return "Robot" + std::to_string(index + 1);
}

} // anonymous namespace

MetricsRecord run_experiment1(Topology topology, const Exp1Options& options)
{
  if (options.robots < 1 || options.hub_consumers < 1 || !(options.rate_hz > 0)
    || options.duration_s < 0)
    throw Error(ErrorCode::InvalidArgument, "experiment 1 needs robots, consumers, rate > 0");

  Rig rig(topology, options);
  auto& fabric = *rig.fabric;

  std::vector<std::string> hosts{kHubHost};
  std::vector<topology::TopicHandle> handles;
  for (int r = 0; r < options.robots; ++r)
  {
    const std::string host = robot_name(r);
    hosts.push_back(host);
    const NodeId node{host, "scan_publisher", host};
    fabric.add_node(node, host);
    handles.push_back(fabric.advertise(node, scan_topic(host), "Blob"));
  }
  std::map<std::string, std::uint64_t> deliveries;
  for (int k = 0; k < options.hub_consumers; ++k)
  {
    const NodeId node{kHubHost, "hub_consumer_" + std::to_string(k + 1), ""};
    fabric.add_node(node, kHubHost);
    for (int r = 0; r < options.robots; ++r)
    {
      const std::string topic = scan_topic(robot_name(r));
      fabric.subscribe(node, topic, "Blob",
        [&deliveries, topic](const messaging::Envelope&) { ++deliveries[topic]; });
    }
  }
  rig.start();

  const auto begin = CounterSnapshot::take(*rig.network, hosts);
  const TimeNs t0 = rig.loop.now();
  const TimeNs end = t0 + seconds_to_ns(options.duration_s);
  const TimeNs period = seconds_to_ns(1.0 / options.rate_hz);
  const auto payload = messaging::make_payload(messaging::Bytes(options.scan_bytes, 0x5a));
  std::map<std::string, std::uint64_t> publishes;
  for (int r = 0; r < options.robots; ++r)
  {
    const TimeNs offset = period * r / options.robots;
    const auto handle = handles[static_cast<std::size_t>(r)];
    const std::string topic = scan_topic(robot_name(r));
    if (t0 + offset >= end)
      continue;
    rig.loop.schedule_every(t0 + offset, period,
      [&, handle, topic, end]()
      {
        if (rig.loop.now() >= end)
          return false;
        fabric.publish(handle, payload);
        ++publishes[topic];
        return true;
      });
  }
  rig.loop.run_until(end);
  const auto finish = CounterSnapshot::take(*rig.network, hosts);

  MetricsRecord record = capture("exp1", std::string(topology::to_string(topology)),
    begin, finish, kHubHost);
  for (const auto& [topic, count] : publishes)
  {
    record.publish_rate_hz[topic] = options.duration_s > 0
      ? static_cast<double>(count) / options.duration_s : 0.0;
  }
  for (const auto& [topic, count] : deliveries)
  {
    record.delivery_rate_hz[topic] = options.duration_s > 0
      ? static_cast<double>(count) / options.duration_s : 0.0;
  }
  return record;
}

MetricsRecord run_experiment2(Topology topology, const Exp2Options& options)
{
  if (!(options.rate_hz > 0) || options.duration_s < 0)
    throw Error(ErrorCode::InvalidArgument, "experiment 2 needs rate > 0");

  Rig rig(topology, options);
  auto& fabric = *rig.fabric;
  const std::string host = robot_name(0);
  const std::vector<std::string> hosts{kHubHost, host};
  const std::string image_topic = "/" + host + "/camera/image";
  const std::string echo_topic = "/" + host + "/camera/image_echo";

  const NodeId camera{host, "camera", host};
  fabric.add_node(camera, host);
  const auto handle = fabric.advertise(camera, image_topic, "Blob");
  std::uint64_t echoes = 0;
  fabric.subscribe(camera, echo_topic, "Blob",
    [&echoes](const messaging::Envelope&) { ++echoes; });
  fabric.spawn_echo("image_echo", image_topic, echo_topic, "Blob");
  rig.start();

  const auto begin = CounterSnapshot::take(*rig.network, hosts);
  const TimeNs t0 = rig.loop.now();
  const TimeNs end = t0 + seconds_to_ns(options.duration_s);
  const TimeNs period = seconds_to_ns(1.0 / options.rate_hz);
  const auto payload = messaging::make_payload(messaging::Bytes(options.image_bytes, 0x3c));
  std::uint64_t publishes = 0;
  if (t0 < end)
  {
    rig.loop.schedule_every(t0, period, [&, end]()
      {
        if (rig.loop.now() >= end)
          return false;
        fabric.publish(handle, payload);
        ++publishes;
        return true;
      });
  }
  rig.loop.run_until(end);
  // Let the last echoes land before freezing the counters.
  if (publishes > 0)
    rig.loop.run_until(end + seconds_to_ns(2.0));
  auto finish = CounterSnapshot::take(*rig.network, hosts);
  finish.at = end;

  MetricsRecord record = capture("exp2", std::string(topology::to_string(topology)),
    begin, finish, kHubHost);
  if (options.duration_s > 0)
  {
    record.publish_rate_hz[image_topic] = static_cast<double>(publishes) / options.duration_s;
    record.delivery_rate_hz[echo_topic] = static_cast<double>(echoes) / options.duration_s;
  }
  return record;
}

std::vector<RttSample> measure_rtt(Topology topology, const RttOptions& options)
{
  if (options.trials < 1 || options.sizes.empty())
    throw Error(ErrorCode::InvalidArgument, "rtt needs sizes and at least one trial");

  Rig rig(topology, options);
  auto& fabric = *rig.fabric;
  const std::string host = robot_name(0);
  const NodeId client{host, "rtt_client", host};
  fabric.add_node(client, host);
  const auto ping = fabric.advertise(client, "/rtt/ping", "Blob");

  std::vector<RttSample> samples;
  const std::string label(topology::to_string(topology));
  TimeNs sent_at = 0;
  bool waiting = false;
  fabric.subscribe(client, "/rtt/pong", "Blob", [&](const messaging::Envelope&)
    {
      if (!waiting)
        return;
      waiting = false;
      samples.back().rtt_s = messaging::ns_to_seconds(rig.loop.now() - sent_at);
    });
  fabric.spawn_echo("rtt_echo", "/rtt/ping", "/rtt/pong", "Blob");
  rig.start();

  const TimeNs timeout = seconds_to_ns(options.timeout_s);
  for (const std::size_t size : options.sizes)
  {
    const auto payload = messaging::make_payload(messaging::Bytes(size, 0x11));
    for (int trial = 0; trial < options.trials; ++trial)
    {
      samples.push_back(RttSample{label, size, trial, 0.0});
      sent_at = rig.loop.now();
      waiting = true;
      fabric.publish(ping, payload);
      const TimeNs deadline = sent_at + timeout;
      while (waiting && !rig.loop.empty())
      {
        const auto next = rig.loop.next_time();
        if (!next || *next > deadline)
          break;
        rig.loop.run_until(*next);
      }
      if (waiting)
      {
        waiting = false;
        samples.pop_back();
        rig.loop.run_until(deadline);
      }
    }
  }
  return samples;
}

std::vector<std::size_t> parse_sizes(const std::string& text)
{
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size())
  {
    const std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())))
      item.erase(item.begin());
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
      item.pop_back();
    if (item.empty())
      throw Error(ErrorCode::InvalidArgument, "empty size in '" + text + "'");
    std::size_t multiplier = 1;
    const char suffix = static_cast<char>(std::tolower(static_cast<unsigned char>(item.back())));
    if (suffix == 'k' || suffix == 'm')
    {
      multiplier = suffix == 'k' ? 1'000 : 1'000'000;
      item.pop_back();
    }
    std::size_t used = 0;
    unsigned long long value = 0;
    try
    {
      value = std::stoull(item, &used);
    }
    catch (const std::exception&)
    {
      used = 0;
    }
    if (used != item.size() || item.empty())
      throw Error(ErrorCode::InvalidArgument, "bad size '" + item + "' in '" + text + "'");
    out.push_back(static_cast<std::size_t>(value) * multiplier);
    if (comma == std::string::npos)
      break;
    pos = comma + 1;
  }
  return out;
}

} // namespace fleet::bench
