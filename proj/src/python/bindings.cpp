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
#include <fleet/planner/grid_map.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fleet;

namespace {

topology::Topology topology_of(const std::string& name)
{
  return topology::parse_topology(name);
}

std::optional<std::vector<CellId>> plan(int width, int height,
  const std::vector<CellId>& blocked, CellId start, CellId goal)
{
  planner::GridMap map(width, height);
  for (const CellId cell : blocked)
    map.block(cell);
  return planner::plan_path(map, start, goal);
}

py::dict run_scenario(const std::string& scenario_json, std::optional<std::string> mode)
{
  auto scenario = app::Scenario::parse(scenario_json);
  std::optional<topology::Topology> t;
  if (mode)
    t = topology_of(*mode);
  app::SimResult result;
  {
    py::gil_scoped_release release;
    result = app::SimRunner(scenario, t).run();
  }
  py::dict out;
  out["events_jsonl"] = result.events_jsonl();
  out["final_cells"] = result.final_cells;
  out["goals_resolved"] = result.goals_resolved;
  out["metrics_csv"] = bench::metrics_csv({result.metrics});
  return out;
}

py::dict record_dict(const bench::MetricsRecord& r)
{
  py::dict out;
  out["json"] = r.to_json().dump();
  out["hub_bytes"] = r.hub_bytes;
  out["cross_host_data_bytes"] = r.cross_host_data_bytes;
  out["total_bytes"] = r.total_bytes();
  out["cpu_proxy"] = r.total_cpu_proxy();
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Fleet simulator core";

  static py::exception<Error> error(m, "FleetError");
  py::register_exception_translator([](std::exception_ptr p)
    {
      try
      {
        if (p)
          std::rethrow_exception(p);
      }
      catch (const Error& e)
      {
        py::set_error(error, e.what());
      }
    });

  m.def("plan_path", &plan, py::arg("width"), py::arg("height"), py::arg("blocked"),
    py::arg("start"), py::arg("goal"),
    "Shortest 4-connected cell path, or None when the goal cannot be reached.");

  m.def("fig6_scenario", []() { return app::fig6_scenario().to_json().dump(); },
    "The shipped three-robot scenario as JSON text.");

  m.def("run_scenario", &run_scenario, py::arg("scenario_json"),
    py::arg("topology") = py::none());

  m.def("replay_final_cells", [](const std::string& jsonl)
    {
      std::vector<nlohmann::json> events;
      std::size_t start = 0;
      while (start < jsonl.size())
      {
        auto end = jsonl.find('\n', start);
        if (end == std::string::npos)
          end = jsonl.size();
        if (end > start)
          events.push_back(nlohmann::json::parse(jsonl.substr(start, end - start)));
        start = end + 1;
      }
      return app::replay_final_cells(events);
    });

  m.def("run_experiment1", [](const std::string& t, double duration_s, std::uint64_t seed)
    {
      bench::Exp1Options options;
      options.duration_s = duration_s;
      options.seed = seed;
      return record_dict(bench::run_experiment1(topology_of(t), options));
    }, py::arg("topology"), py::arg("duration_s") = 60.0, py::arg("seed") = 1);

  m.def("run_experiment2", [](const std::string& t, double duration_s, std::uint64_t seed)
    {
      bench::Exp2Options options;
      options.duration_s = duration_s;
      options.seed = seed;
      return record_dict(bench::run_experiment2(topology_of(t), options));
    }, py::arg("topology"), py::arg("duration_s") = 30.0, py::arg("seed") = 1);

  m.def("median_rtt", [](const std::string& t, const std::string& sizes, int trials)
    {
      bench::RttOptions options;
      options.sizes = bench::parse_sizes(sizes);
      options.trials = trials;
      return bench::median_rtt(bench::measure_rtt(topology_of(t), options));
    }, py::arg("topology"), py::arg("sizes") = "1k,10k,100k,1m", py::arg("trials") = 30);
}
