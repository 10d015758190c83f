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
#include <fleet/app/robot_agent.hpp>
#include <fleet/app/scenario.hpp>
#include <fleet/app/sim_runner.hpp>
#include <fleet/bench/experiments.hpp>
#include <fleet/errors.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

using namespace fleet;
using nlohmann::json;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::atomic<bool> g_stop{false};

void on_signal(int)
{
  g_stop = true;
}

int exit_code(const Error& e)
{
  switch (e.code())
  {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidCell:
    case ErrorCode::InvalidGoal:
    case ErrorCode::OccupiedCell:
    case ErrorCode::InvalidConnection:
    case ErrorCode::TypeMismatch:
    case ErrorCode::NameConflict:
    case ErrorCode::UnknownBehavior:
      return kConfigError;
    default:
      return kRuntimeError;
  }
}

std::vector<topology::Topology> topologies(const std::string& name)
{
  if (name == "all")
    return {topology::Topology::Single, topology::Topology::Multi, topology::Topology::Cloud};
  return {topology::parse_topology(name)};
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path);
  out << text;
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

const std::vector<std::string> kModes{"single", "multi", "cloud", "sms", "mms", "crs"};

//==============================================================================
struct SimArgs
{
  std::string scenario;
  std::string topology;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::string out = "runs/sim";
};

int run_sim(const SimArgs& args)
{
  app::Scenario scenario = args.scenario == "fig6" ? app::fig6_scenario()
    : app::Scenario::load(args.scenario);
  for (const auto& warning : scenario.warnings)
    std::cerr << "warning: " << warning << "\n";
  if (args.seed)
    scenario.seed = args.seed;
  if (args.duration)
    scenario.duration = *args.duration;
  std::optional<topology::Topology> mode;
  if (!args.topology.empty())
    mode = topology::parse_topology(args.topology);

  app::SimRunner runner(scenario, mode);
  const auto result = runner.run();

  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  write_file(dir / "events.jsonl", result.events_jsonl());
  bench::emit_report({result.metrics}, {}, args.out);

  std::cout << "scenario " << scenario.name << " on "
            << topology::to_string(runner.topology()) << ": " << result.events.size()
            << " events, goals " << (result.goals_resolved ? "resolved" : "pending") << "\n";
  for (const auto& [robot, cell] : result.final_cells)
    std::cout << "  " << robot << " at cell " << cell << "\n";
  std::cout << "wrote " << (dir / "events.jsonl").string() << "\n";
  return result.goals_resolved ? 0 : kRuntimeError;
}

//==============================================================================
struct BenchArgs
{
  std::string experiment;
  std::string topology = "all";
  std::string sizes = "1k,10k,100k,1m";
  std::optional<int> trials;
  std::optional<double> duration;
  std::uint64_t seed = 1;
  std::string out = "runs/bench";
};

int run_bench(const BenchArgs& args)
{
  std::vector<bench::MetricsRecord> records;
  std::vector<bench::RttSample> samples;
  for (const auto topology : topologies(args.topology))
  {
    if (args.experiment == "exp1")
    {
      bench::Exp1Options options;
      options.seed = args.seed;
      if (args.duration)
        options.duration_s = *args.duration;
      records.push_back(bench::run_experiment1(topology, options));
    }
    else if (args.experiment == "exp2")
    {
      bench::Exp2Options options;
      options.seed = args.seed;
      if (args.duration)
        options.duration_s = *args.duration;
      records.push_back(bench::run_experiment2(topology, options));
    }
    else
    {
      bench::RttOptions options;
      options.seed = args.seed;
      options.sizes = bench::parse_sizes(args.sizes);
      if (args.trials)
        options.trials = *args.trials;
      const auto got = bench::measure_rtt(topology, options);
      samples.insert(samples.end(), got.begin(), got.end());
    }
  }

  std::filesystem::create_directories(args.out);
  const auto files = bench::emit_report(records, samples, args.out, args.experiment + "_");
  for (const auto& r : records)
  {
    std::cout << r.topology << ": hub " << r.hub_bytes << " B, cross-host data "
              << r.cross_host_data_bytes << " B, cpu proxy "
              << bench::format_fixed(r.total_cpu_proxy()) << " ev/s\n";
  }
  if (!samples.empty())
  {
    std::map<std::string, std::vector<bench::RttSample>> by_topology;
    for (const auto& s : samples)
      by_topology[s.topology].push_back(s);
    for (const auto& [name, group] : by_topology)
    {
      std::cout << name << " median RTT:";
      for (const auto& [size, rtt] : bench::median_rtt(group))
        std::cout << " " << size << "B=" << bench::format_fixed(rtt) << "s";
      std::cout << "\n";
    }
  }
  std::cout << "wrote " << files.summary_json << "\n";
  return 0;
}

//==============================================================================
int run_replay(const std::string& path)
{
  const auto events = app::read_event_log(path);
  const auto cells = app::replay_final_cells(events);
  std::cout << json(cells).dump() << "\n";
  for (auto it = events.rbegin(); it != events.rend(); ++it)
  {
    if (it->value("type", "") != "end")
      continue;
    const auto logged = it->at("finalCells").get<std::map<std::string, CellId>>();
    if (logged != cells)
    {
      std::cerr << "replayed cells differ from the logged end state\n";
      return kRuntimeError;
    }
    break;
  }
  return 0;
}

//==============================================================================
struct ServerArgs
{
  app::ServerOptions options;
  std::string mode = "single";
  std::string scenario;
  std::string out;
};

int run_server(ServerArgs args)
{
  args.options.mode = topology::parse_topology(args.mode);
  args.options.scenario = args.scenario.empty() ? app::default_server_scenario()
    : args.scenario == "fig6" ? app::fig6_scenario() : app::Scenario::load(args.scenario);
  if (args.scenario.empty() || args.scenario == "fig6")
    args.options.scenario.duration = 1e7;

  app::FleetServer server(args.options);
  server.start();
  for (const auto& line : server.ready_lines())
    std::cout << line << "\n";
  std::cout << "ready" << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop)
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();

  if (!args.out.empty())
  {
    std::filesystem::create_directories(args.out);
    std::string text;
    for (const auto& event : server.events())
      text += event.dump() + "\n";
    write_file(std::filesystem::path(args.out) / "events.jsonl", text);
  }
  std::cout << "stopped" << std::endl;
  return 0;
}

//==============================================================================
struct RobotArgs
{
  app::AgentOptions options;
  std::string mode = "single";
  std::string config;
  double duration = 0.0;
};

int run_robot(RobotArgs args)
{
  args.options.mode = topology::parse_topology(args.mode);
  if (!args.config.empty())
  {
    auto config = topology::CloudConfig::load(args.config);
    for (const auto& warning : config.warnings)
      std::cerr << "warning: " << warning << "\n";
    const auto url = topology::parse_url(config.url);
    if (url.port > 0)
      args.options.handshake_port = url.port;
    args.options.config = std::move(config);
  }
  app::RobotAgent agent(args.options);
  agent.connect();
  std::cout << agent.robot().name() << " connected after " << agent.attempts_made()
            << " attempt(s)\n";
  if (!agent.config_report().is_null())
    std::cout << agent.config_report().dump() << "\n";
  std::cout << "ready" << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto start = std::chrono::steady_clock::now();
  while (!g_stop && agent.connected())
  {
    const double elapsed = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - start).count();
    if (args.duration > 0 && elapsed >= args.duration)
      break;
    agent.run_for(0.2);
  }
  std::cout << agent.robot().name() << " at cell " << agent.robot().current_cell() << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Fleet management simulator and middleware"};
  app.require_subcommand(1);

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("sim", "Run a scenario on the virtual clock");
  sim_cmd->add_option("scenario", sim.scenario, "Scenario JSON file, or 'fig6'")->required();
  sim_cmd->add_option("--mode,--topology", sim.topology, "Override the scenario topology")
    ->check(CLI::IsMember(kModes));
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--duration", sim.duration, "Seconds of scenario time");
  sim_cmd->add_option("--out", sim.out, "Output directory")->envname("FLEET_OUT");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark experiment");
  bench_cmd->add_option("experiment", bench.experiment)->required()
    ->check(CLI::IsMember({"exp1", "exp2", "rtt"}));
  bench_cmd->add_option("--topology,--mode", bench.topology)
    ->check(CLI::IsMember({"all", "single", "multi", "cloud", "sms", "mms", "crs"}));
  bench_cmd->add_option("--sizes", bench.sizes, "RTT payload sizes, e.g. 1k,10k,100k,1m");
  bench_cmd->add_option("--trials", bench.trials);
  bench_cmd->add_option("--duration", bench.duration, "Seconds of virtual time");
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--out", bench.out, "Output directory")->envname("FLEET_OUT");

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "Reconstruct final cells from an event log");
  replay_cmd->add_option("events", replay_path)->required()->check(CLI::ExistingFile);

  ServerArgs server;
  auto* server_cmd = app.add_subcommand("server", "Serve the stack over sockets");
  server_cmd->add_option("--mode", server.mode)->check(CLI::IsMember(kModes))
    ->envname("FLEET_MODE");
  server_cmd->add_option("--config,--scenario", server.scenario, "Scenario JSON file");
  server_cmd->add_option("--host", server.options.host)->envname("FLEET_HOST");
  server_cmd->add_option("--console-port", server.options.console_port)
    ->envname("FLEET_CONSOLE_PORT");
  server_cmd->add_option("--robot-port", server.options.robot_port)->envname("FLEET_ROBOT_PORT");
  server_cmd->add_option("--handshake-port", server.options.handshake_port)
    ->envname("FLEET_HANDSHAKE_PORT");
  server_cmd->add_option("--accounts", server.options.accounts_file, "user:password file");
  server_cmd->add_option("--speed", server.options.speed, "Scenario seconds per wall second");
  server_cmd->add_option("--out", server.out, "Write events.jsonl here on shutdown");

  RobotArgs robot;
  auto* robot_cmd = app.add_subcommand("robot", "Run one robot against a server");
  robot_cmd->add_option("--name", robot.options.name);
  robot_cmd->add_option("--mode", robot.mode)->check(CLI::IsMember(kModes))
    ->envname("FLEET_MODE");
  robot_cmd->add_option("--config", robot.config, "Cloud config file (cloud mode)")
    ->check(CLI::ExistingFile);
  robot_cmd->add_option("--host", robot.options.host)->envname("FLEET_HOST");
  robot_cmd->add_option("--robot-port", robot.options.robot_port)->envname("FLEET_ROBOT_PORT");
  robot_cmd->add_option("--handshake-port", robot.options.handshake_port)
    ->envname("FLEET_HANDSHAKE_PORT");
  robot_cmd->add_option("--start", robot.options.start, "Start cell");
  robot_cmd->add_option("--speed", robot.options.speed, "Cells per second");
  robot_cmd->add_option("--attempts", robot.options.attempts);
  robot_cmd->add_option("--seed", robot.options.seed);
  robot_cmd->add_option("--duration", robot.duration, "Wall seconds to run; 0 runs until stopped");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try
  {
    if (sim_cmd->parsed())
      return run_sim(sim);
    if (bench_cmd->parsed())
      return run_bench(bench);
    if (replay_cmd->parsed())
      return run_replay(replay_path);
    if (server_cmd->parsed())
      return run_server(server);
    if (robot_cmd->parsed())
      return run_robot(robot);
  }
  catch (const Error& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
