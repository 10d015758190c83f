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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fleet {

enum class ErrorCode
{
  TypeMismatch,
  InvalidTopic,
  LinkDown,
  MasterDown,
  NameConflict,
  InvalidRelay,
  AuthFailed,
  AlreadyConnected,
  NotConnected,
  UnknownBehavior,
  InvalidConnection,
  InvalidConfig,
  InvalidCell,
  OccupiedCell,
  InvalidGoal,
  PathRejected,
  InvalidArgument,
  IoError,
  StartupError,
  ConnectFailed,
};

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> parse_error_code(std::string_view name);

/// Every failure surfaced by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return _code; }
  const std::string& detail() const noexcept { return _detail; }

private:
  ErrorCode _code;
  std::string _detail;
};

} // namespace fleet
