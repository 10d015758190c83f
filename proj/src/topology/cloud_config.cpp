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
#include <fleet/topology/cloud_config.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fleet::topology {

std::string_view to_string(InterfaceType type)
{
  switch (type)
  {
    case InterfaceType::Publisher: return "PublisherInterface";
    case InterfaceType::Subscriber: return "SubscriberInterface";
    case InterfaceType::ServiceClient: return "ServiceClientInterface";
    case InterfaceType::ServiceProvider: return "ServiceProviderInterface";
  }
  return "";
}

InterfaceType parse_interface_type(std::string_view text)
{
  if (text == "PublisherInterface")
    return InterfaceType::Publisher;
  if (text == "SubscriberInterface")
    return InterfaceType::Subscriber;
  if (text == "ServiceClientInterface")
    return InterfaceType::ServiceClient;
  if (text == "ServiceProviderInterface")
    return InterfaceType::ServiceProvider;
  throw Error(ErrorCode::InvalidConfig,
    "unknown iType '" + std::string(text) + "'");
}

bool is_source(InterfaceType type)
{
  return type == InterfaceType::Subscriber
    || type == InterfaceType::ServiceClient;
}

bool compatible(InterfaceType a, InterfaceType b)
{
  using T = InterfaceType;
  return (a == T::Subscriber && b == T::Publisher)
    || (a == T::Publisher && b == T::Subscriber)
    || (a == T::ServiceClient && b == T::ServiceProvider)
    || (a == T::ServiceProvider && b == T::ServiceClient);
}

std::pair<std::string, std::string> split_connection_tag(std::string_view tag)
{
  const auto slash = tag.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == tag.size()
    || tag.find('/', slash + 1) != std::string_view::npos)
  {
    throw Error(ErrorCode::InvalidConnection, "connection tag '"
      + std::string(tag) + "' is not endpointTag/interfaceTag");
  }
  return {std::string(tag.substr(0, slash)), std::string(tag.substr(slash + 1))};
}

namespace {

std::string field_string(
  const nlohmann::json& object, const std::string& key, const std::string& path,
  bool required = true)
{
  const auto it = object.find(key);
  if (it == object.end())
  {
    if (required)
      throw Error(ErrorCode::InvalidConfig, "missing field '" + path + key + "'");
    return {};
  }
  if (!it->is_string())
    throw Error(ErrorCode::InvalidConfig,
      "field '" + path + key + "' must be a string");
  return it->get<std::string>();
}

const nlohmann::json& field_array(
  const nlohmann::json& root, const std::string& key, nlohmann::json& empty)
{
  const auto it = root.find(key);
  if (it == root.end())
    return empty;
  if (!it->is_array())
    throw Error(ErrorCode::InvalidConfig, "field '" + key + "' must be an array");
  return *it;
}

void warn_unknown(
  const nlohmann::json& object, const std::set<std::string>& known,
  const std::string& path, std::vector<std::string>& warnings)
{
  for (const auto& [key, value] : object.items())
    if (!known.contains(key))
      warnings.push_back("ignoring unmodeled key '" + path + key + "'");
}

std::pair<std::size_t, std::size_t> line_and_column(
  std::string_view text, std::size_t offset)
{
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
  {
    if (text[i] == '\n')
    {
      ++line;
      column = 1;
    }
    else
    {
      ++column;
    }
  }
  return {line, column};
}

} // anonymous namespace

CloudConfig CloudConfig::parse(std::string_view text)
{
  nlohmann::json json;
  try
  {
    json = nlohmann::json::parse(text);
  }
  catch (const nlohmann::json::parse_error& e)
  {
    const auto [line, column] = line_and_column(
      text, e.byte > 0 ? e.byte - 1 : 0);
    throw Error(ErrorCode::InvalidConfig, "syntax error at line "
      + std::to_string(line) + ", column " + std::to_string(column));
  }
  return from_json(json);
}

CloudConfig CloudConfig::from_json(const nlohmann::json& json)
{
  if (!json.is_object())
    throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");

  CloudConfig config;
  config.url = field_string(json, "url", "");
  config.user_id = field_string(json, "userID", "");
  config.password = field_string(json, "password", "");
  config.robot_id = field_string(json, "robotID", "");
  warn_unknown(json, {"url", "userID", "password", "robotID", "containers",
      "nodes", "interfaces", "connections"}, "", config.warnings);

  nlohmann::json empty = nlohmann::json::array();

  const auto& containers = field_array(json, "containers", empty);
  for (std::size_t i = 0; i < containers.size(); ++i)
  {
    const auto& entry = containers[i];
    const std::string path = "containers[" + std::to_string(i) + "].";
    if (entry.is_string())
    {
      config.containers.push_back({entry.get<std::string>()});
      continue;
    }
    if (!entry.is_object())
      throw Error(ErrorCode::InvalidConfig, "field 'containers["
        + std::to_string(i) + "]' must be an object");
    config.containers.push_back({field_string(entry, "cTag", path)});
    warn_unknown(entry, {"cTag"}, path, config.warnings);
  }

  const auto& nodes = field_array(json, "nodes", empty);
  for (std::size_t i = 0; i < nodes.size(); ++i)
  {
    const auto& entry = nodes[i];
    const std::string path = "nodes[" + std::to_string(i) + "].";
    if (!entry.is_object())
      throw Error(ErrorCode::InvalidConfig, "field 'nodes["
        + std::to_string(i) + "]' must be an object");
    NodeSpec node;
    node.ctag = field_string(entry, "cTag", path);
    node.ntag = field_string(entry, "nTag", path);
    node.pkg = field_string(entry, "pkg", path);
    node.exe = field_string(entry, "exe", path);
    node.args = field_string(entry, "args", path, false);
    node.ns = field_string(entry, "namespace", path, false);
    warn_unknown(entry, {"cTag", "nTag", "pkg", "exe", "args", "namespace"},
      path, config.warnings);
    config.nodes.push_back(std::move(node));
  }

  const auto& interfaces = field_array(json, "interfaces", empty);
  for (std::size_t i = 0; i < interfaces.size(); ++i)
  {
    const auto& entry = interfaces[i];
    const std::string path = "interfaces[" + std::to_string(i) + "].";
    if (!entry.is_object())
      throw Error(ErrorCode::InvalidConfig, "field 'interfaces["
        + std::to_string(i) + "]' must be an object");
    InterfaceSpec iface;
    iface.etag = field_string(entry, "eTag", path);
    iface.itag = field_string(entry, "iTag", path);
    const std::string type = field_string(entry, "iType", path);
    try
    {
      iface.type = parse_interface_type(type);
    }
    catch (const Error&)
    {
      throw Error(ErrorCode::InvalidConfig, "field '" + path
        + "iType' has unknown value '" + type + "'");
    }
    iface.cls = field_string(entry, "iCls", path);
    iface.addr = field_string(entry, "addr", path);
    warn_unknown(entry, {"eTag", "iTag", "iType", "iCls", "addr"}, path,
      config.warnings);
    config.interfaces.push_back(std::move(iface));
  }

  const auto& connections = field_array(json, "connections", empty);
  for (std::size_t i = 0; i < connections.size(); ++i)
  {
    const auto& entry = connections[i];
    const std::string path = "connections[" + std::to_string(i) + "].";
    if (!entry.is_object())
      throw Error(ErrorCode::InvalidConfig, "field 'connections["
        + std::to_string(i) + "]' must be an object");
    config.connections.push_back(
      {field_string(entry, "tagA", path), field_string(entry, "tagB", path)});
    warn_unknown(entry, {"tagA", "tagB"}, path, config.warnings);
  }

  return config;
}

CloudConfig CloudConfig::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

nlohmann::json CloudConfig::to_json() const
{
  nlohmann::json json{
    {"url", url}, {"userID", user_id}, {"password", password},
    {"robotID", robot_id},
    {"containers", nlohmann::json::array()},
    {"nodes", nlohmann::json::array()},
    {"interfaces", nlohmann::json::array()},
    {"connections", nlohmann::json::array()},
  };
  for (const auto& c : containers)
    json["containers"].push_back({{"cTag", c.ctag}});
  for (const auto& n : nodes)
    json["nodes"].push_back({{"cTag", n.ctag}, {"nTag", n.ntag}, {"pkg", n.pkg},
      {"exe", n.exe}, {"args", n.args}, {"namespace", n.ns}});
  for (const auto& i : interfaces)
    json["interfaces"].push_back({{"eTag", i.etag}, {"iTag", i.itag},
      {"iType", std::string(to_string(i.type))}, {"iCls", i.cls},
      {"addr", i.addr}});
  for (const auto& c : connections)
    json["connections"].push_back({{"tagA", c.tag_a}, {"tagB", c.tag_b}});
  return json;
}

void CloudConfig::validate() const
{
  if (robot_id.empty())
    throw Error(ErrorCode::InvalidConfig, "robotID must not be empty");

  std::set<std::string> container_tags;
  for (const auto& c : containers)
  {
    if (c.ctag.empty())
      throw Error(ErrorCode::InvalidConfig, "empty cTag");
    if (c.ctag == robot_id)
      throw Error(ErrorCode::InvalidConfig,
        "cTag '" + c.ctag + "' collides with the robotID");
    container_tags.insert(c.ctag);
  }

  for (const auto& n : nodes)
  {
    if (!container_tags.contains(n.ctag))
      throw Error(ErrorCode::InvalidConfig, "node '" + n.ntag
        + "' references undeclared container '" + n.ctag + "'");
  }

  std::map<std::string, const InterfaceSpec*> declared;
  for (const auto& i : interfaces)
  {
    if (i.etag != robot_id && !container_tags.contains(i.etag))
      throw Error(ErrorCode::InvalidConfig, "interface '" + i.itag
        + "' references unknown endpoint '" + i.etag + "'");
    if (i.addr.empty() || i.addr.front() != '/')
      throw Error(ErrorCode::InvalidConfig, "interface '" + i.itag
        + "' addr must be an absolute topic");
    if (!declared.emplace(i.etag + "/" + i.itag, &i).second)
      throw Error(ErrorCode::InvalidConfig, "duplicate iTag '" + i.itag
        + "' on endpoint '" + i.etag + "'");
  }

  for (const auto& c : connections)
  {
    for (const auto& tag : {c.tag_a, c.tag_b})
    {
      split_connection_tag(tag);
      if (!declared.contains(tag))
        throw Error(ErrorCode::InvalidConnection,
          "connection references undeclared interface '" + tag + "'");
    }
  }
}

} // namespace fleet::topology
