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

#include <fleet/bench/metrics.hpp>
#include <fleet/messaging/link_model.hpp>
#include <fleet/topology/fabric.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace fleet::bench {

using topology::Topology;

struct CommonOptions
{
  messaging::LinkModel link;
  std::size_t header_bytes = 64;
  std::uint64_t seed = 1;
};

/// Robots publish scan blobs that several consumers on one hub subscribe to.
struct Exp1Options : CommonOptions
{
  int robots = 5;
  std::size_t scan_bytes = 20'000;
  double rate_hz = 5.0;
  double duration_s = 60.0;
  int hub_consumers = 2;
};

/// One robot publishes images; a node on the server echoes them back.
struct Exp2Options : CommonOptions
{
  std::size_t image_bytes = 200'000;
  double rate_hz = 2.0;
  double duration_s = 30.0;
};

struct RttOptions : CommonOptions
{
  std::vector<std::size_t> sizes{1'000, 10'000, 100'000, 1'000'000};
  int trials = 30;
  /// A trial whose echo has not arrived after this long is skipped.
  double timeout_s = 5.0;
};

inline constexpr const char* kHubHost = "server";

MetricsRecord run_experiment1(Topology topology, const Exp1Options& options);
MetricsRecord run_experiment2(Topology topology, const Exp2Options& options);
std::vector<RttSample> measure_rtt(Topology topology, const RttOptions& options);

/// Parses "1k,10k,100k,1m" style lists; k is 1000 and m is 1000000.
/// Throws InvalidArgument.
std::vector<std::size_t> parse_sizes(const std::string& text);

} // namespace fleet::bench
