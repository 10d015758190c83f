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

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace fleet::topology {

enum class InterfaceType
{
  Publisher,
  Subscriber,
  ServiceClient,
  ServiceProvider,
};

std::string_view to_string(InterfaceType type);

/// Accepts "PublisherInterface", "SubscriberInterface",
/// "ServiceClientInterface" and "ServiceProviderInterface".
InterfaceType parse_interface_type(std::string_view text);

/// Interfaces that take data from their local graph and push it across a
/// connection.
bool is_source(InterfaceType type);

/// True for the two pairings data may flow across: subscriber into
/// publisher, and service client into service provider.
bool compatible(InterfaceType a, InterfaceType b);

struct ContainerSpec
{
  std::string ctag;
  bool operator==(const ContainerSpec&) const = default;
};

struct NodeSpec
{
  std::string ctag;
  std::string ntag;
  std::string pkg;
  std::string exe;
  std::string args;
  std::string ns;
  bool operator==(const NodeSpec&) const = default;
};

struct InterfaceSpec
{
  std::string etag;
  std::string itag;
  InterfaceType type = InterfaceType::Publisher;
  std::string cls;
  std::string addr;
  bool operator==(const InterfaceSpec&) const = default;
};

struct ConnectionSpec
{
  std::string tag_a;
  std::string tag_b;
  bool operator==(const ConnectionSpec&) const = default;
};

/// Robot-side configuration document: handshake credentials followed by the
/// containers, nodes, interfaces and connections to provision.
struct CloudConfig
{
  std::string url;
  std::string user_id;
  std::string password;
  std::string robot_id;
  std::vector<ContainerSpec> containers;
  std::vector<NodeSpec> nodes;
  std::vector<InterfaceSpec> interfaces;
  std::vector<ConnectionSpec> connections;

  /// Keys that were present but are not modeled; they are ignored.
  std::vector<std::string> warnings;

  /// Parses JSON text. Syntax errors report line and column; schema errors
  /// name the offending field. Both throw InvalidConfig.
  static CloudConfig parse(std::string_view text);
  static CloudConfig from_json(const nlohmann::json& json);
  static CloudConfig load(const std::string& path);

  nlohmann::json to_json() const;

  /// Checks the self-contained invariants: node containers are declared,
  /// interface endpoints are this robot or a declared container, interface
  /// tags are unique per endpoint, and connection tags are well formed.
  void validate() const;
};

/// Splits "endpointTag/interfaceTag". Throws InvalidConnection.
std::pair<std::string, std::string> split_connection_tag(std::string_view tag);

} // namespace fleet::topology
