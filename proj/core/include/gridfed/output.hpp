#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gridfed/scenario.hpp"

namespace gridfed {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// CSV writers. Column names are part of the external interface.

std::string reliability_csv(std::span<const IntervalMetrics> rows, SimTime interval);
std::string delay_csv(std::span<const DelayStats> rows, SimTime interval);
std::string ddf_csv(std::span<const SweepRow> rows);
std::string exchange_log_csv(std::span<const ExchangeRecord> exchanges, const ScenarioConfig& cfg);
std::string link_log_csv(std::span<const LinkSample> samples);
std::string topology_csv(std::span<const NodeDescriptor> nodes);
std::string trace_csv(std::span<const DeliveryRecord> trace);

void write_text(const std::filesystem::path& path, const std::string& text);

struct ExperimentStatus {
  std::string name;
  std::string status;
  std::string detail;
};

struct RunManifest {
  ScenarioConfig cfg;
  std::string version;
  std::string transport;
  double wallclock_s = 0.0;
  std::vector<double> federate_wallclock_s;
  std::vector<std::string> outputs;
  std::vector<ExperimentStatus> experiments;
};

std::string manifest_json(const RunManifest& m);

/// Version string baked in at build time.
std::string_view library_version();

} // namespace gridfed
