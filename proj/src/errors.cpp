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
#include <fleet/errors.hpp>

namespace fleet {

std::string_view to_string(ErrorCode code)
{
  switch (code)
  {
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::InvalidTopic: return "InvalidTopic";
    case ErrorCode::LinkDown: return "LinkDown";
    case ErrorCode::MasterDown: return "MasterDown";
    case ErrorCode::NameConflict: return "NameConflict";
    case ErrorCode::InvalidRelay: return "InvalidRelay";
    case ErrorCode::AuthFailed: return "AuthFailed";
    case ErrorCode::AlreadyConnected: return "AlreadyConnected";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::UnknownBehavior: return "UnknownBehavior";
    case ErrorCode::InvalidConnection: return "InvalidConnection";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidCell: return "InvalidCell";
    case ErrorCode::OccupiedCell: return "OccupiedCell";
    case ErrorCode::InvalidGoal: return "InvalidGoal";
    case ErrorCode::PathRejected: return "PathRejected";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::StartupError: return "StartupError";
    case ErrorCode::ConnectFailed: return "ConnectFailed";
  }
  return "Unknown";
}

std::optional<ErrorCode> parse_error_code(std::string_view name)
{
  for (int i = 0; i <= static_cast<int>(ErrorCode::ConnectFailed); ++i)
  {
    const auto code = static_cast<ErrorCode>(i);
    if (to_string(code) == name)
      return code;
  }
  return std::nullopt;
}

Error::Error(ErrorCode code, const std::string& detail)
: std::runtime_error(std::string(to_string(code)) + ": " + detail),
  _code(code),
  _detail(detail)
{
}

} // namespace fleet
