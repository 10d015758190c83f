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

#include <fleet/app/sim_runner.hpp>

#include <json.hpp>

#include <vector>

namespace fleet::app {

/// Console messages for one logged event: a "map_delta" or "path" when the
/// event carries one, always followed by {"type":"event"}.
std::vector<nlohmann::json> console_messages(const nlohmann::json& event);

/// {"type":"map_snapshot", width, height, blocked, version}
nlohmann::json console_snapshot(SimRunner& runner);

/// One {"type":"pose"} per robot, in cell units.
std::vector<nlohmann::json> console_poses(SimRunner& runner);

/// Applies a client command. Returns {"type":"ack"} or {"type":"error"}
/// carrying the error code; an "id" in the command is echoed back.
nlohmann::json handle_console_command(SimRunner& runner, const nlohmann::json& command);

} // namespace fleet::app
