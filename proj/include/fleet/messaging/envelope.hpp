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

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fleet::messaging {

using Bytes = std::vector<std::uint8_t>;

/// Nanoseconds on either the virtual clock (sim mode) or the monotonic wall
/// clock (socket mode).
using TimeNs = std::int64_t;

constexpr TimeNs kNsPerSecond = 1'000'000'000;

constexpr TimeNs seconds_to_ns(double s)
{
  return static_cast<TimeNs>(s * 1e9 + (s >= 0 ? 0.5 : -0.5));
}

constexpr double ns_to_seconds(TimeNs ns)
{
  return static_cast<double>(ns) / 1e9;
}

//==============================================================================
struct NodeId
{
  /// Machine or domain the node runs in.
  std::string domain;
  std::string name;
  /// Optional namespace prefix, without slashes (e.g. "Robot1").
  std::string ns;

  /// Name as seen inside one pub/sub graph: "/ns/name" or "/name".
  std::string graph_name() const;

  /// Unique across the whole running system: "domain:/ns/name".
  std::string qualified() const;

  /// Inverse of qualified().
  static NodeId parse(std::string_view qualified);

  bool operator==(const NodeId&) const = default;
  auto operator<=>(const NodeId&) const = default;
};

//==============================================================================
/// Immutable message unit. The payload is shared so fan-out never copies it.
struct Envelope
{
  std::string topic;
  std::string msg_type;
  std::shared_ptr<const Bytes> payload;
  std::uint64_t msg_id = 0;
  TimeNs sent_at = 0;
  NodeId sender;

  std::size_t payload_size() const { return payload ? payload->size() : 0; }

  std::span<const std::uint8_t> payload_view() const
  {
    if (!payload)
      return {};
    return {payload->data(), payload->size()};
  }

  std::string payload_string() const;
};

std::shared_ptr<const Bytes> make_payload(Bytes bytes);
std::shared_ptr<const Bytes> make_payload(std::string_view text);

/// Topic names are absolute and never end with a slash (except "/").
bool is_valid_topic(std::string_view topic);

/// Throws InvalidTopic if the name is not absolute.
void require_valid_topic(std::string_view topic);

/// Control-plane topics live under "/__" and are excluded from data counters.
bool is_control_topic(std::string_view topic);

} // namespace fleet::messaging
