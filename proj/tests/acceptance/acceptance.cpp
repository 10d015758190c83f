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
#include <fleet/app/scenario.hpp>
#include <fleet/app/sim_runner.hpp>
#include <fleet/bench/experiments.hpp>
#include <fleet/errors.hpp>
#include <fleet/messages.hpp>
#include <fleet/messaging/framing.hpp>
#include <fleet/planner/grid_map.hpp>
#include <fleet/topology/cloud.hpp>
#include <fleet/topology/multi_master.hpp>
#include <fleet/topology/single_master.hpp>

#include "../support/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#ifndef FLEET_DATA_DIR
#define FLEET_DATA_DIR "data"
#endif

using namespace fleet;
using messaging::Bytes;
using messaging::Envelope;
using messaging::EventLoop;
using messaging::Network;
using messaging::seconds_to_ns;
using nlohmann::json;
using topology::Topology;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict
{
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::vector<Topology> kAll{Topology::Single, Topology::Multi, Topology::Cloud};

std::string name(Topology t)
{
  return std::string(topology::to_string(t));
}

//==============================================================================
Verdict planner_optimality()
{
  const auto start = Clock::now();
  planner::GridMap map;
  const auto mask = oracle::blocked_mask(map);
  int pairs = 0;
  int mismatches = 0;
  for (int s = 0; s < map.size(); ++s)
  {
    for (int g = 0; g < map.size(); ++g)
    {
      ++pairs;
      const auto path = planner::plan_path(map, s, g);
      const auto expected = oracle::bfs_distance(8, 8, mask, s, g);
      if (!path || !expected || static_cast<int>(path->size()) - 1 != *expected
        || !planner::path_valid(map, *path) || path->front() != s || path->back() != g)
        ++mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream out;
  out << pairs << " pairs, " << mismatches << " mismatches, " << elapsed << " s (limit 5 s)";
  return {pairs == 4096 && mismatches == 0 && elapsed < 5.0, out.str()};
}

//==============================================================================
Verdict fig6_replay()
{
  const auto scenario = app::Scenario::load(std::string(FLEET_DATA_DIR) + "/scenarios/fig6.json");
  const auto result = app::SimRunner(scenario).run();
  const auto again = app::SimRunner(scenario).run();
  const auto& events = result.events;

  std::int64_t t_block = -1;
  for (const auto& e : events)
  {
    if (e.value("type", "") == "block" && e.value("cell", -1) == 26 && e.value("changed", false))
    {
      t_block = e.at("t").get<std::int64_t>();
      break;
    }
  }
  if (t_block != seconds_to_ns(5.0))
    return {false, "no block of cell 26 at t=5 s in the log"};

  // Active path at the block: the last path a robot was sent, from the last
  // cell it reached onwards.
  std::map<std::string, std::vector<CellId>> path;
  std::map<std::string, CellId> cell;
  for (const auto& e : events)
  {
    if (e.at("t").get<std::int64_t>() >= t_block)
      break;
    const std::string type = e.value("type", "");
    if (type == "path")
      path[e.at("robot")] = e.at("cells").get<std::vector<CellId>>();
    if (type == "spawn" || type == "cell")
      cell[e.at("robot")] = e.at("cell").get<CellId>();
  }
  std::set<std::string> affected;
  std::set<std::string> robots;
  for (const auto& spec : scenario.robots)
  {
    robots.insert(spec.name);
    const auto& p = path[spec.name];
    const auto here = std::find(p.begin(), p.end(), cell[spec.name]);
    if (std::find(here, p.end(), 26) != p.end())
      affected.insert(spec.name);
  }
  if (affected.empty())
    return {false, "no robot's active path contained cell 26"};

  std::vector<std::string> problems;
  for (const auto& robot : robots)
  {
    bool cancelled = false;
    bool replanned = false;
    int cancels = 0;
    for (const auto& e : events)
    {
      if (e.value("robot", "") != robot)
        continue;
      const std::string type = e.value("type", "");
      if (type == "cancel")
      {
        ++cancels;
        if (e.at("t").get<std::int64_t>() >= t_block && e.value("value", 0) == 1)
          cancelled = true;
      }
      if (type == "path" && cancelled && !replanned)
      {
        const auto cells = e.at("cells").get<std::vector<CellId>>();
        replanned = std::find(cells.begin(), cells.end(), 26) == cells.end();
      }
    }
    if (affected.contains(robot) && !(cancelled && replanned))
      problems.push_back(robot + " lacks cancel then path without 26");
    if (!affected.contains(robot) && cancels != 0)
      problems.push_back(robot + " is unaffected but was cancelled");
  }
  const bool deterministic = result.events_jsonl() == again.events_jsonl();
  if (!deterministic)
    problems.push_back("second run differs");

  std::ostringstream out;
  out << "affected {";
  for (const auto& r : affected)
    out << " " << r;
  out << " } of " << robots.size() << " robots";
  for (const auto& p : problems)
    out << "; " << p;
  if (problems.empty())
    out << "; cancel+replan only for affected; rerun byte-identical";
  return {problems.empty(), out.str()};
}

//==============================================================================
// Two domains: a fleet network with five robots and the server.
constexpr int kRobots = 5;

std::vector<std::string> robot_topics(int r)
{
  const std::string ns = "/Robot" + std::to_string(r);
  return {ns + "/scan", ns + "/amcl_pose", ns + "/odom"};
}

std::set<std::string> all_topics()
{
  std::set<std::string> out;
  for (int r = 1; r <= kRobots; ++r)
    for (const auto& t : robot_topics(r))
      out.insert(t);
  return out;
}

std::set<std::string> scan_topics()
{
  std::set<std::string> out;
  for (int r = 1; r <= kRobots; ++r)
    out.insert("/Robot" + std::to_string(r) + "/scan");
  return out;
}

Verdict visibility_matrix()
{
  std::vector<std::string> problems;

  // Single master: every node resolves every topic.
  {
    EventLoop loop;
    Network net(loop, 3);
    topology::SingleMasterSystem sms(net, "server");
    std::vector<topology::NodeId> nodes;
    for (int r = 1; r <= kRobots; ++r)
    {
      const topology::NodeId node{"fleet", "driver", "Robot" + std::to_string(r)};
      sms.register_node(node, "fleet");
      for (const auto& t : robot_topics(r))
        sms.advertise(node, t, "Blob");
      nodes.push_back(node);
    }
    const topology::NodeId planner{"server", "planner", ""};
    sms.register_node(planner, "server");
    nodes.push_back(planner);
    std::set<std::pair<std::string, std::string>> resolved;
    std::set<std::pair<std::string, std::string>> expected;
    for (const auto& node : nodes)
    {
      for (const auto& t : all_topics())
      {
        expected.insert({node.qualified(), t});
        if (!sms.lookup(node, t).empty())
          resolved.insert({node.qualified(), t});
      }
    }
    if (resolved != expected)
      problems.push_back("SMS resolved " + std::to_string(resolved.size()) + " of "
        + std::to_string(expected.size()));
  }

  // Multi master, allowlist = scan topics on the server domain.
  {
    EventLoop loop;
    Network net(loop, 4);
    topology::MultiMasterSystem mms(net);
    mms.add_domain("fleet", "fleet");
    mms.add_domain("server", "server");
    for (int r = 1; r <= kRobots; ++r)
    {
      const topology::NodeId node{"fleet", "driver", "Robot" + std::to_string(r)};
      mms.register_node(node);
      for (const auto& t : robot_topics(r))
        mms.advertise(node, t, "Blob");
    }
    mms.sync_topics("server", scan_topics());
    mms.start();
    loop.run_until(seconds_to_ns(5.0));
    std::set<std::string> resolved;
    for (const auto& t : all_topics())
    {
      if (!mms.lookup("server", t).empty())
        resolved.insert(t);
    }
    if (resolved != scan_topics())
      problems.push_back("MMS resolved " + std::to_string(resolved.size())
        + " topics cross-domain, allowlist has " + std::to_string(scan_topics().size()));
  }

  // Cloud: only declared and connected interfaces carry bytes.
  {
    EventLoop loop;
    Network net(loop, 5);
    topology::CloudSystem cloud(net, "server");
    cloud.add_account("fleet", "fleet");
    std::vector<std::pair<topology::Bus*, topology::NodeId>> drivers;
    std::vector<std::vector<topology::TopicHandle>> handles;
    for (int r = 1; r <= kRobots; ++r)
    {
      const std::string id = "robot" + std::to_string(r);
      cloud.handshake({"http://server:9000/", "fleet", "fleet", id}, id);
      topology::CloudConfig config;
      config.robot_id = id;
      config.containers = {{"ctr"}};
      const std::string scan = "/Robot" + std::to_string(r) + "/scan";
      config.interfaces = {
        {"ctr", "scanIn_" + std::to_string(r), topology::InterfaceType::Publisher, "Blob", scan},
        {id, "scanOut_" + std::to_string(r), topology::InterfaceType::Subscriber, "Blob", scan}};
      config.connections = {{"ctr/scanIn_" + std::to_string(r),
        id + "/scanOut_" + std::to_string(r)}};
      cloud.apply_config(config);

      auto& graph = cloud.robot_graph(id);
      const topology::NodeId node{id, "driver", "Robot" + std::to_string(r)};
      graph.register_node(node, id);
      std::vector<topology::TopicHandle> hs;
      for (const auto& t : robot_topics(r))
        hs.push_back(graph.advertise(node, t, "Blob"));
      handles.push_back(hs);
      drivers.push_back({&graph, node});
    }
    auto& box = cloud.container("ctr").bus();
    const topology::NodeId listener{"ctr", "listener", ""};
    box.register_node(listener, "server");
    std::set<std::string> received;
    for (const auto& t : all_topics())
      box.subscribe(listener, t, "Blob", [&received, t](const Envelope&) { received.insert(t); });
    loop.run_until(seconds_to_ns(0.5));
    const auto before = net.traffic();
    for (int round = 0; round < 3; ++round)
    {
      for (std::size_t r = 0; r < handles.size(); ++r)
        for (const auto& h : handles[r])
          drivers[r].first->publish(h, Bytes(1000));
      loop.run_until(loop.now() + seconds_to_ns(0.5));
    }
    // Topics whose bytes crossed between hosts, with connection hops mapped
    // back to the address of their source interface.
    std::map<std::uint64_t, std::string> hop_source;
    for (const auto& conn : cloud.connections())
    {
      for (const auto& iface : cloud.interfaces())
      {
        if (conn.source == iface.etag + "/" + iface.itag)
          hop_source[conn.id] = iface.addr;
      }
    }
    std::set<std::string> crossed;
    for (const auto& [key, counters] : net.traffic())
    {
      const auto old = before.find(key);
      const std::uint64_t bytes = counters.bytes - (old == before.end() ? 0 : old->second.bytes);
      if (bytes == 0 || key.from_host == key.to_host || key.topic.rfind("/__", 0) == 0)
        continue;
      if (key.topic.rfind("/rce/conn/", 0) == 0)
        crossed.insert(hop_source[std::stoull(key.topic.substr(10))]);
      else
        crossed.insert(key.topic);
    }
    if (received != scan_topics() || crossed != scan_topics())
      problems.push_back("CRS delivered " + std::to_string(received.size())
        + " topics, " + std::to_string(crossed.size()) + " topics crossed hosts");
  }

  std::ostringstream out;
  out << "2 domains, " << kRobots << " robots, " << all_topics().size() << " topics";
  for (const auto& p : problems)
    out << "; " << p;
  if (problems.empty())
    out << "; SMS all, MMS == allowlist, CRS == connected (exact set equality)";
  return {problems.empty(), out.str()};
}

//==============================================================================
Verdict master_failure()
{
  EventLoop loop;
  messaging::LinkModel link;
  link.loss_rate = 0.0;
  Network net(loop, 7, link);
  topology::SingleMasterSystem sms(net, "server");
  const topology::NodeId robot{"robot1", "amcl", "Robot1"};
  const topology::NodeId planner{"server", "planner", ""};
  sms.register_node(robot, "robot1");
  sms.register_node(planner, "server");
  int got = 0;
  sms.subscribe(planner, "/Robot1/amcl_pose", "PoseMsg", [&](const Envelope&) { ++got; });
  const auto handle = sms.advertise(robot, "/Robot1/amcl_pose", "PoseMsg");
  sms.publish(handle, Bytes(100));
  loop.run_until(seconds_to_ns(1.0));
  const int before = got;

  sms.kill_master();
  constexpr int kAfter = 200;
  for (int i = 0; i < kAfter; ++i)
  {
    sms.publish(handle, Bytes(100));
    loop.run_until(loop.now() + seconds_to_ns(0.01));
  }
  loop.run_until(loop.now() + seconds_to_ns(1.0));
  const int delivered = got - before;

  bool master_down = false;
  try
  {
    sms.subscribe(planner, "/Robot1/scan", "Blob", nullptr);
  }
  catch (const Error& e)
  {
    master_down = e.code() == ErrorCode::MasterDown;
  }
  std::ostringstream out;
  out << delivered << "/" << kAfter << " delivered after kill_master, new subscribe "
      << (master_down ? "MasterDown" : "did not fail with MasterDown");
  return {before == 1 && delivered == kAfter && delivered >= 100 && master_down, out.str()};
}

//==============================================================================
Verdict experiment1()
{
  const auto start = Clock::now();
  std::map<Topology, std::uint64_t> hub;
  for (const auto t : kAll)
    hub[t] = bench::run_experiment1(t, bench::Exp1Options{}).hub_bytes;
  const double elapsed = seconds_since(start);
  const auto sms = static_cast<double>(hub[Topology::Single]);
  const auto mms = static_cast<double>(hub[Topology::Multi]);
  const auto crs = static_cast<double>(hub[Topology::Cloud]);
  std::ostringstream out;
  out << "hub bytes SMS " << hub[Topology::Single] << " MMS " << hub[Topology::Multi]
      << " CRS " << hub[Topology::Cloud] << ", SMS/CRS " << sms / crs << " (need >= 1.2), "
      << elapsed << " s (limit 30 s)";
  return {sms > mms && mms >= crs && sms >= 1.2 * crs && elapsed < 30.0, out.str()};
}

//==============================================================================
Verdict experiment2()
{
  std::map<Topology, bench::MetricsRecord> records;
  for (const auto t : kAll)
    records[t] = bench::run_experiment2(t, bench::Exp2Options{});
  std::uint64_t lo = UINT64_MAX;
  std::uint64_t hi = 0;
  for (const auto& [t, r] : records)
  {
    lo = std::min(lo, r.cross_host_data_bytes);
    hi = std::max(hi, r.cross_host_data_bytes);
  }
  const double spread = lo == 0 ? 1e9 : static_cast<double>(hi - lo) / static_cast<double>(lo);
  const double cs = records[Topology::Single].total_cpu_proxy();
  const double cm = records[Topology::Multi].total_cpu_proxy();
  const double cc = records[Topology::Cloud].total_cpu_proxy();
  std::ostringstream out;
  out << "bytes SMS " << records[Topology::Single].cross_host_data_bytes << " MMS "
      << records[Topology::Multi].cross_host_data_bytes << " CRS "
      << records[Topology::Cloud].cross_host_data_bytes << ", spread " << spread * 100
      << "% (limit 10%); cpu proxy SMS " << cs << " MMS " << cm << " CRS " << cc;
  return {lo > 0 && spread <= 0.10 && cc >= cm && cm >= cs, out.str()};
}

//==============================================================================
Verdict rtt_curve()
{
  bench::RttOptions options;
  options.sizes = {1'000, 10'000, 100'000, 1'000'000};
  options.trials = 30;
  std::map<Topology, std::map<std::size_t, double>> medians;
  bool complete = true;
  for (const auto t : kAll)
  {
    const auto samples = bench::measure_rtt(t, options);
    medians[t] = bench::median_rtt(samples);
    complete = complete && medians[t].size() == options.sizes.size();
  }
  bool monotone = true;
  for (const auto& [t, m] : medians)
  {
    double last = 0.0;
    for (const auto& [size, rtt] : m)
    {
      monotone = monotone && rtt >= last;
      last = rtt;
    }
  }
  bool close = true;
  double worst = 1.0;
  for (const auto size : options.sizes)
  {
    double lo = 1e18;
    double hi = 0.0;
    for (const auto& [t, m] : medians)
    {
      const auto it = m.find(size);
      if (it == m.end())
        continue;
      lo = std::min(lo, it->second);
      hi = std::max(hi, it->second);
    }
    worst = std::max(worst, hi / lo);
    close = close && hi <= 2.0 * lo;
  }
  std::ostringstream out;
  for (const auto& [t, m] : medians)
  {
    out << name(t) << " [";
    for (const auto& [size, rtt] : m)
      out << " " << rtt * 1000 << "ms";
    out << " ] ";
  }
  out << "worst cross-topology ratio " << worst << " (limit 2)";
  return {complete && monotone && close, out.str()};
}

//==============================================================================
Verdict cloud_conformance()
{
  const auto config = topology::CloudConfig::load(std::string(FLEET_DATA_DIR) + "/configs/robot1.config");
  EventLoop loop;
  Network net(loop, 11);
  topology::CloudSystem cloud(net, "server");
  cloud.load_accounts(std::string(FLEET_DATA_DIR) + "/configs/accounts.txt");

  const auto request = topology::HandshakeRequest::from_config(config);
  const auto response = cloud.handshake(request, "robot1");
  const auto in = topology::parse_url(request.url);
  const auto back = topology::parse_url(response.url);
  const bool flow = in.port == 9000 && back.port == 9010 && back.scheme == "ws"
    && back.path == "/" + config.robot_id;

  const auto report = cloud.apply_config(config);
  std::size_t declared_robot_ifaces = 0;
  for (const auto& iface : config.interfaces)
    declared_robot_ifaces += iface.etag == config.robot_id ? 1 : 0;
  const bool counts = cloud.containers().size() == 1
    && cloud.container("cTag_01").nodes().size() == 1
    && cloud.container("cTag_01").node("move_client_node_1").spec().pkg == "move_client"
    && cloud.interfaces().size() == config.interfaces.size()
    && cloud.connections().size() == config.connections.size()
    && config.connections.size() == 1 && report.failures() == 0;

  auto& robot = cloud.robot_graph(config.robot_id);
  const topology::NodeId amcl{config.robot_id, "amcl", "Robot1"};
  robot.register_node(amcl, "robot1");
  const std::string cls = "geometry_msgs/PoseWithCovarianceStamped";
  const auto handle = robot.advertise(amcl, "/Robot1/amcl_pose", cls);
  auto& box = cloud.container("cTag_01").bus();
  const topology::NodeId listener{"cTag_01", "listener", ""};
  box.register_node(listener, "server");
  std::vector<std::string> hashes;
  box.subscribe(listener, "/Robot1/amcl_pose", cls,
    [&](const Envelope& e) { hashes.push_back(messaging::sha256_hex(e.payload_view())); });
  const std::string payload = PoseMsg{"Robot1", 3.0, 4.0, 0.5, 35, "idle", 0, false}.to_json().dump();
  robot.publish(handle, Bytes(payload.begin(), payload.end()));
  loop.run_until(seconds_to_ns(1.0));
  const Bytes bytes(payload.begin(), payload.end());
  const bool traversed = hashes.size() == 1 && hashes[0] == messaging::sha256_hex(bytes);

  std::ostringstream out;
  out << "handshake " << request.url << " -> " << response.url << "; "
      << cloud.containers().size() << " container, "
      << cloud.container("cTag_01").nodes().size() << " node, "
      << cloud.interfaces().size() << " interfaces (" << declared_robot_ifaces
      << " robot-side), " << cloud.connections().size() << " connection; amcl_pose envelope "
      << (traversed ? "arrived intact" : "did not arrive intact");
  return {flow && counts && traversed, out.str()};
}

//==============================================================================
app::Scenario random_scenario(std::uint64_t seed, Topology t)
{
  std::mt19937_64 rng(seed);
  app::Scenario s;
  s.name = "random" + std::to_string(seed);
  s.seed = seed;
  s.duration = 30.0;
  s.topology = std::string(t == Topology::Single ? "single" : t == Topology::Multi ? "multi" : "cloud");
  s.link.jitter = 0.001;
  std::vector<CellId> cells(64);
  for (int i = 0; i < 64; ++i)
    cells[i] = i;
  std::shuffle(cells.begin(), cells.end(), rng);
  std::size_t next = 0;
  for (int r = 1; r <= 3; ++r)
  {
    s.robots.push_back({"Robot" + std::to_string(r), cells[next++], 1.0, 2, 5.0, 0.05});
  }
  for (int b = 0; b < 4; ++b)
    s.blocked.push_back(cells[next++]);
  std::sort(s.blocked.begin(), s.blocked.end());
  for (int r = 1; r <= 3; ++r)
    s.goals.push_back({0.0, "Robot" + std::to_string(r), cells[next++]});
  s.obstacles.push_back({3.0, cells[next++], "block", ""});
  s.obstacles.push_back({6.0, cells[next++], "surprise", "Robot2"});
  s.obstacles.push_back({9.0, s.blocked[0], "unblock", ""});
  return s;
}

Verdict determinism()
{
  std::vector<app::Scenario> scenarios{app::fig6_scenario()};
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    for (const auto t : kAll)
      scenarios.push_back(random_scenario(seed * 10 + static_cast<std::uint64_t>(t), t));
  int identical = 0;
  for (const auto& s : scenarios)
  {
    const auto a = app::SimRunner(s).run();
    const auto b = app::SimRunner(s).run();
    if (a.events_jsonl() == b.events_jsonl()
      && bench::metrics_csv({a.metrics}) == bench::metrics_csv({b.metrics}))
      ++identical;
  }
  std::ostringstream out;
  out << identical << "/" << scenarios.size()
      << " scenarios byte-identical in events.jsonl and metrics.csv across two runs";
  return {identical == static_cast<int>(scenarios.size()), out.str()};
}

} // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
    {"planner-optimality", planner_optimality},
    {"fig6-replay", fig6_replay},
    {"visibility-matrix", visibility_matrix},
    {"master-failure", master_failure},
    {"exp1-traffic-ordering", experiment1},
    {"exp2-parity", experiment2},
    {"rtt-curve", rtt_curve},
    {"cloud-config-conformance", cloud_conformance},
    {"determinism", determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [label, check] : criteria)
  {
    ++index;
    Verdict verdict;
    try
    {
      verdict = check();
    }
    catch (const std::exception& e)
    {
      verdict = {false, std::string("threw: ") + e.what()};
    }
    failures += verdict.pass ? 0 : 1;
    std::printf("%s [%d] %s: %s\n", verdict.pass ? "PASS" : "FAIL", index, label.c_str(),
      verdict.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
    criteria.size());
  return failures == 0 ? 0 : 1;
}
