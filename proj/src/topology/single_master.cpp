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
#include <fleet/topology/single_master.hpp>

namespace fleet::topology {

SingleMasterSystem::SingleMasterSystem(
  Network& network, std::string master_host, int master_port)
: _bus(network, "sms", std::move(master_host), master_port)
{
}

std::vector<NodeId> SingleMasterSystem::lookup(
  const NodeId& asker, const std::string& topic) const
{
  if (!_bus.registered(asker))
    throw Error(ErrorCode::InvalidArgument,
      asker.qualified() + " is not registered with the master");
  return _bus.lookup(topic);
}

} // namespace fleet::topology
