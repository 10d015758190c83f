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
#include <fleet/messaging/envelope.hpp>

namespace fleet::messaging {

std::string NodeId::graph_name() const
{
  if (ns.empty())
    return "/" + name;
  return "/" + ns + "/" + name;
}

std::string NodeId::qualified() const
{
  return domain + ":" + graph_name();
}

NodeId NodeId::parse(std::string_view qualified)
{
  NodeId id;
  const auto colon = qualified.find(':');
  std::string_view rest = qualified;
  if (colon != std::string_view::npos)
  {
    id.domain = std::string(qualified.substr(0, colon));
    rest = qualified.substr(colon + 1);
  }
  if (!rest.empty() && rest.front() == '/')
    rest.remove_prefix(1);

  const auto slash = rest.rfind('/');
  if (slash == std::string_view::npos)
  {
    id.name = std::string(rest);
  }
  else
  {
    id.ns = std::string(rest.substr(0, slash));
    id.name = std::string(rest.substr(slash + 1));
  }
  return id;
}

std::string Envelope::payload_string() const
{
  if (!payload)
    return {};
  return std::string(payload->begin(), payload->end());
}

std::shared_ptr<const Bytes> make_payload(Bytes bytes)
{
  return std::make_shared<const Bytes>(std::move(bytes));
}

std::shared_ptr<const Bytes> make_payload(std::string_view text)
{
  return std::make_shared<const Bytes>(text.begin(), text.end());
}

bool is_valid_topic(std::string_view topic)
{
  if (topic.empty() || topic.front() != '/')
    return false;
  if (topic.size() > 1 && topic.back() == '/')
    return false;
  return topic.find("//") == std::string_view::npos;
}

void require_valid_topic(std::string_view topic)
{
  if (!is_valid_topic(topic))
    throw Error(ErrorCode::InvalidTopic, "topic must be absolute: '"
      + std::string(topic) + "'");
}

bool is_control_topic(std::string_view topic)
{
  return topic.rfind("/__", 0) == 0;
}

} // namespace fleet::messaging
