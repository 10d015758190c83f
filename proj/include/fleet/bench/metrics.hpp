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

#include <fleet/messaging/network.hpp>

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace fleet::bench {

using messaging::LinkCounters;
using messaging::Network;
using messaging::TimeNs;
using messaging::TrafficKey;

/// One CSV row: traffic of one topic over one directed host pair.
struct LinkRow
{
  std::string link;   // "from->to"
  std::string topic;
  std::uint64_t bytes = 0;
  std::uint64_t msgs = 0;
  double rate_hz = 0.0;
};

struct MetricsRecord
{
  std::string scenario;
  std::string topology;
  double duration_s = 0.0;
  std::vector<LinkRow> rows;

  /// Publishes and deliveries per second, keyed by topic.
  std::map<std::string, double> publish_rate_hz;
  std::map<std::string, double> delivery_rate_hz;

  /// Envelope-handling events per second, keyed by host.
  std::map<std::string, double> cpu_proxy;

  /// Every byte that arrived at the hub host from elsewhere.
  std::uint64_t hub_bytes = 0;

  /// Data bytes that crossed between different hosts, both directions.
  std::uint64_t cross_host_data_bytes = 0;

  std::uint64_t total_bytes() const;
  std::uint64_t total_msgs() const;
  double total_cpu_proxy() const;

  nlohmann::json to_json() const;
};

struct RttSample
{
  std::string topology;
  std::size_t size_bytes = 0;
  int trial = 0;
  double rtt_s = 0.0;
};

/// Median RTT per payload size.
std::map<std::size_t, double> median_rtt(const std::vector<RttSample>& samples);

/// Frozen copy of the counters a measurement window is computed from.
struct CounterSnapshot
{
  TimeNs at = 0;
  std::map<TrafficKey, LinkCounters> traffic;
  std::map<std::string, std::uint64_t> host_events;

  static CounterSnapshot take(const Network& network, const std::vector<std::string>& hosts);
};

/// Builds a record from the counter deltas between two snapshots.
MetricsRecord capture(
  const std::string& scenario, const std::string& topology,
  const CounterSnapshot& begin, const CounterSnapshot& end,
  const std::string& hub_host);

struct ReportFiles
{
  std::string metrics_csv;
  std::string rtt_csv;
  std::string summary_json;
  std::string plot_data;
};

/// Writes "<prefix>metrics.csv", "<prefix>rtt.csv" (when samples exist),
/// "<prefix>summary.json" and "<prefix>plot.dat" into `dir`. Throws
/// InvalidArgument for an empty record list and IoError when a file cannot
/// be written.
ReportFiles emit_report(
  const std::vector<MetricsRecord>& records,
  const std::vector<RttSample>& samples,
  const std::string& dir,
  const std::string& prefix = "");

/// CSV text, exposed for tests and the CLI.
std::string metrics_csv(const std::vector<MetricsRecord>& records);
std::string rtt_csv(const std::vector<RttSample>& samples);
nlohmann::json summary_json(
  const std::vector<MetricsRecord>& records, const std::vector<RttSample>& samples);

/// Fixed six-decimal rendering used in every CSV.
std::string format_fixed(double value);

} // namespace fleet::bench
