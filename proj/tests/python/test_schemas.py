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
from pathlib import Path

import pytest

import fleet_sim

jsonschema = pytest.importorskip("jsonschema")

ROOT = Path(__file__).resolve().parents[2]
DATA = Path(os.environ.get("FLEET_DATA_DIR", ROOT / "data"))
SCHEMAS = ROOT / "schemas"


def load_schema(name):
    schema = json.loads((SCHEMAS / name).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return schema


def test_shipped_scenarios_validate():
    schema = load_schema("scenario.schema.json")
    files = sorted((DATA / "scenarios").glob("*.json"))
    assert files
    for path in files:
        jsonschema.validate(json.loads(path.read_text()), schema)


def test_shipped_cloud_configs_validate():
    schema = load_schema("cloud_config.schema.json")
    files = sorted((DATA / "configs").glob("*.config"))
    assert files
    for path in files:
        jsonschema.validate(json.loads(path.read_text()), schema)


def test_scenario_schema_rejects_surprise_without_robot():
    schema = load_schema("scenario.schema.json")
    scenario = fleet_sim.fig6_scenario()
    scenario["obstacles"].append({"t": 1.0, "cell": 5, "action": "surprise"})
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(scenario, schema)


def test_benchmark_records_validate():
    schema = load_schema("summary.schema.json")
    records = [fleet_sim.run_experiment1(t, duration_s=2.0)["record"] for t in ("single", "multi", "cloud")]
    summary = {
        "records": records,
        "hubBytesRanking": [r["topology"] for r in records],
        "rttMedianS": {"single": {str(k): v for k, v in fleet_sim.median_rtt("single", "1k", 3).items()}},
    }
    jsonschema.validate(summary, schema)
