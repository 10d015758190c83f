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
#include <fleet/bench/metrics.hpp>

#include <fleet/errors.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fleet::bench {

std::uint64_t MetricsRecord::total_bytes() const
{
  std::uint64_t sum = 0;
  for (const auto& row : rows)
    sum += row.bytes;
  return sum;
}

std::uint64_t MetricsRecord::total_msgs() const
{
  std::uint64_t sum = 0;
  for (const auto& row : rows)
    sum += row.msgs;
  return sum;
}

double MetricsRecord::total_cpu_proxy() const
{
  double sum = 0.0;
  for (const auto& [host, rate] : cpu_proxy)
    sum += rate;
  return sum;
}

nlohmann::json MetricsRecord::to_json() const
{
  return {
    {"scenario", scenario},
    {"topology", topology},
    {"durationS", duration_s},
    {"totals", {{"bytes", total_bytes()}, {"msgs", total_msgs()}}},
    {"hubBytes", hub_bytes},
    {"crossHostDataBytes", cross_host_data_bytes},
    {"cpuProxy", cpu_proxy},
    {"cpuProxyTotal", total_cpu_proxy()},
    {"publishRateHz", publish_rate_hz},
    {"deliveryRateHz", delivery_rate_hz},
  };
}

std::map<std::size_t, double> median_rtt(const std::vector<RttSample>& samples)
{
  std::map<std::size_t, std::vector<double>> by_size;
  for (const auto& s : samples)
    by_size[s.size_bytes].push_back(s.rtt_s);
  std::map<std::size_t, double> out;
  for (auto& [size, values] : by_size)
  {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    out[size] = n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  }
  return out;
}

CounterSnapshot CounterSnapshot::take(
  const Network& network, const std::vector<std::string>& hosts)
{
  CounterSnapshot snap;
  snap.at = network.now();
  snap.traffic = network.traffic();
  for (const auto& host : hosts)
    snap.host_events[host] = network.host_events(host);
  return snap;
}

MetricsRecord capture(
  const std::string& scenario, const std::string& topology,
  const CounterSnapshot& begin, const CounterSnapshot& end,
  const std::string& hub_host)
{
  MetricsRecord record;
  record.scenario = scenario;
  record.topology = topology;
  record.duration_s = messaging::ns_to_seconds(end.at - begin.at);

  for (const auto& [key, counters] : end.traffic)
  {
    LinkCounters before;
    if (const auto it = begin.traffic.find(key); it != begin.traffic.end())
      before = it->second;
    const std::uint64_t bytes = counters.bytes - before.bytes;
    const std::uint64_t msgs = counters.msgs - before.msgs;
    if (msgs == 0 && bytes == 0)
      continue;
    LinkRow row;
    row.link = key.from_host + "->" + key.to_host;
    row.topic = key.topic;
    row.bytes = bytes;
    row.msgs = msgs;
    row.rate_hz = record.duration_s > 0 ? static_cast<double>(msgs) / record.duration_s : 0.0;
    record.rows.push_back(row);

    if (key.from_host != key.to_host)
    {
      if (key.to_host == hub_host)
        record.hub_bytes += bytes;
      if (!messaging::is_control_topic(key.topic))
        record.cross_host_data_bytes += bytes;
    }
  }

  for (const auto& [host, count] : end.host_events)
  {
    std::uint64_t before = 0;
    if (const auto it = begin.host_events.find(host); it != begin.host_events.end())
      before = it->second;
    record.cpu_proxy[host] = record.duration_s > 0
      ? static_cast<double>(count - before) / record.duration_s : 0.0;
  }
  return record;
}

std::string format_fixed(double value)
{
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

namespace {

std::string csv_field(const std::string& text)
{
  if (text.find_first_of(",\"\n") == std::string::npos)
    return text;
  std::string out = "\"";
  for (const char c : text)
  {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out)
    throw Error(ErrorCode::IoError, "short write to " + path.string());
}

} // anonymous namespace

std::string metrics_csv(const std::vector<MetricsRecord>& records)
{
  std::ostringstream out;
  out << "scenario,topology,link,topic,bytes,msgs,rate_hz,duration_s\n";
  for (const auto& record : records)
  {
    for (const auto& row : record.rows)
    {
      out << csv_field(record.scenario) << ',' << csv_field(record.topology) << ','
          << csv_field(row.link) << ',' << csv_field(row.topic) << ','
          << row.bytes << ',' << row.msgs << ',' << format_fixed(row.rate_hz) << ','
          << format_fixed(record.duration_s) << '\n';
    }
  }
  return out.str();
}

std::string rtt_csv(const std::vector<RttSample>& samples)
{
  std::ostringstream out;
  out << "topology,size_bytes,trial,rtt_s\n";
  for (const auto& s : samples)
  {
    char rtt[64];
    std::snprintf(rtt, sizeof(rtt), "%.9f", s.rtt_s);
    out << csv_field(s.topology) << ',' << s.size_bytes << ',' << s.trial << ','
        << rtt << '\n';
  }
  return out.str();
}

nlohmann::json summary_json(
  const std::vector<MetricsRecord>& records, const std::vector<RttSample>& samples)
{
  nlohmann::json out;
  out["records"] = nlohmann::json::array();
  for (const auto& record : records)
    out["records"].push_back(record.to_json());

  std::vector<const MetricsRecord*> ranked;
  for (const auto& record : records)
    ranked.push_back(&record);
  std::stable_sort(ranked.begin(), ranked.end(),
    [](const MetricsRecord* a, const MetricsRecord* b) { return a->hub_bytes > b->hub_bytes; });
  out["hubBytesRanking"] = nlohmann::json::array();
  for (const auto* record : ranked)
    out["hubBytesRanking"].push_back(record->topology);

  std::map<std::string, std::vector<RttSample>> by_topology;
  for (const auto& s : samples)
    by_topology[s.topology].push_back(s);
  out["rttMedianS"] = nlohmann::json::object();
  for (const auto& [topology, list] : by_topology)
  {
    nlohmann::json medians = nlohmann::json::object();
    for (const auto& [size, median] : median_rtt(list))
      medians[std::to_string(size)] = median;
    out["rttMedianS"][topology] = medians;
  }
  return out;
}

ReportFiles emit_report(
  const std::vector<MetricsRecord>& records,
  const std::vector<RttSample>& samples,
  const std::string& dir,
  const std::string& prefix)
{
  if (records.empty() && samples.empty())
    throw Error(ErrorCode::InvalidArgument, "no records to report");

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());

  const std::filesystem::path base(dir);
  ReportFiles files;

  std::ostringstream plot;
  plot << "series,x,y\n";
  for (const auto& record : records)
  {
    plot << "hub_bytes," << record.topology << ',' << record.hub_bytes << '\n';
    plot << "cross_host_data_bytes," << record.topology << ','
         << record.cross_host_data_bytes << '\n';
    plot << "cpu_proxy," << record.topology << ',' << format_fixed(record.total_cpu_proxy())
         << '\n';
  }
  std::map<std::string, std::vector<RttSample>> by_topology;
  for (const auto& s : samples)
    by_topology[s.topology].push_back(s);
  for (const auto& [topology, list] : by_topology)
  {
    for (const auto& [size, median] : median_rtt(list))
    {
      char value[64];
      std::snprintf(value, sizeof(value), "%.9f", median);
      plot << "rtt_median_" << topology << ',' << size << ',' << value << '\n';
    }
  }

  if (!records.empty())
  {
    files.metrics_csv = (base / (prefix + "metrics.csv")).string();
    write_file(files.metrics_csv, metrics_csv(records));
  }
  if (!samples.empty())
  {
    files.rtt_csv = (base / (prefix + "rtt.csv")).string();
    write_file(files.rtt_csv, rtt_csv(samples));
  }
  files.summary_json = (base / (prefix + "summary.json")).string();
  write_file(files.summary_json, summary_json(records, samples).dump(2) + "\n");
  files.plot_data = (base / (prefix + "plot.dat")).string();
  write_file(files.plot_data, plot.str());
  return files;
}

} // namespace fleet::bench
