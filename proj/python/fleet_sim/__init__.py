# Copyright (C) 2026 Fleet Middleware Contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Python bindings for the fleet simulator."""

import json

from . import _core
from ._core import FleetError, plan_path, median_rtt

__all__ = [
    "FleetError",
    "plan_path",
    "median_rtt",
    "fig6_scenario",
    "run_scenario",
    "replay_final_cells",
    "run_experiment1",
    "run_experiment2",
]


def fig6_scenario():
    return json.loads(_core.fig6_scenario())


def run_scenario(scenario, topology=None):
    """Runs a scenario dict or JSON string; events come back parsed."""
    text = scenario if isinstance(scenario, str) else json.dumps(scenario)
    result = _core.run_scenario(text, topology)
    result["events"] = [json.loads(line) for line in result["events_jsonl"].splitlines()]
    return result


def replay_final_cells(events_jsonl):
    return _core.replay_final_cells(events_jsonl)


def run_experiment1(topology, duration_s=60.0, seed=1):
    record = _core.run_experiment1(topology, duration_s, seed)
    record["record"] = json.loads(record.pop("json"))
    return record


def run_experiment2(topology, duration_s=30.0, seed=1):
    record = _core.run_experiment2(topology, duration_s, seed)
    record["record"] = json.loads(record.pop("json"))
    return record
