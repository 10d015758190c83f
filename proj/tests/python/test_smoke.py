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

import json
import os
import random
from collections import deque
from pathlib import Path

import pytest

import fleet_sim

DATA = Path(os.environ.get("FLEET_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def bfs_length(width, height, blocked, start, goal):
    """Cells on a shortest path, or None."""
    dist = {start: 1}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        if cell == goal:
            return dist[cell]
        r, c = divmod(cell, width)
        for nr, nc in ((r - 1, c), (r, c + 1), (r + 1, c), (r, c - 1)):
            if 0 <= nr < height and 0 <= nc < width:
                n = nr * width + nc
                if n not in blocked and n not in dist:
                    dist[n] = dist[cell] + 1
                    queue.append(n)
    return None


def test_plan_path_matches_bfs():
    rng = random.Random(7)
    for _ in range(200):
        blocked = set(rng.sample(range(64), 12))
        free = [c for c in range(64) if c not in blocked]
        start, goal = rng.choice(free), rng.choice(free)
        path = fleet_sim.plan_path(8, 8, sorted(blocked), start, goal)
        expected = bfs_length(8, 8, blocked, start, goal)
        if expected is None:
            assert path is None
        else:
            assert len(path) == expected
            assert path[0] == start and path[-1] == goal
            assert not blocked.intersection(path)


def test_plan_path_rejects_out_of_range():
    with pytest.raises(fleet_sim.FleetError):
        fleet_sim.plan_path(8, 8, [], 0, 64)


def test_builtin_fig6_matches_shipped_file():
    shipped = json.loads((DATA / "scenarios" / "fig6.json").read_text())
    assert fleet_sim.fig6_scenario() == shipped


@pytest.mark.parametrize("topology", ["single", "multi", "cloud"])
def test_fig6_reaches_goals(topology):
    scenario = fleet_sim.fig6_scenario()
    result = fleet_sim.run_scenario(scenario, topology)
    goals = {g["robot"]: g["cell"] for g in scenario["goals"]}
    assert result["goals_resolved"]
    assert result["final_cells"] == goals
    assert result["events"][0]["type"] == "start"
    assert fleet_sim.replay_final_cells(result["events_jsonl"]) == goals
    blocked_cell = scenario["obstacles"][0]["cell"]
    entered = [e for e in result["events"] if e["type"] == "cell" and e.get("cell") == blocked_cell]
    assert entered == []


def test_same_seed_same_log():
    scenario = fleet_sim.fig6_scenario()
    a = fleet_sim.run_scenario(scenario, "multi")
    b = fleet_sim.run_scenario(scenario, "multi")
    assert a["events_jsonl"] == b["events_jsonl"]
    assert a["metrics_csv"] == b["metrics_csv"]


def test_bad_scenario_raises():
    with pytest.raises(fleet_sim.FleetError):
        fleet_sim.run_scenario("{\"robots\": 3}")


def test_experiment1_hub_ordering():
    hub = {t: fleet_sim.run_experiment1(t, duration_s=5.0)["hub_bytes"] for t in ("single", "multi", "cloud")}
    assert hub["single"] > hub["multi"] >= hub["cloud"]


def test_rtt_grows_with_size():
    medians = fleet_sim.median_rtt("single", "1k,1m", 5)
    assert medians[1000] < medians[1000000]
