#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridfed/config.hpp"
#include "gridfed/exchange.hpp"
#include "gridfed/metrics.hpp"
#include "gridfed/net_federate.hpp"
#include "gridfed/rti.hpp"
#include "gridfed/socket_transport.hpp"
#include "gridfed/topology.hpp"

namespace gridfed {

enum class TransportKind { InProcess, Socket };

std::string_view to_string(TransportKind t);
std::optional<TransportKind> transport_from_string(std::string_view s);

inline constexpr const char* kItFederateName = "it";
inline constexpr const char* kNetFederateName = "net";

struct RunOptions {
  ScenarioConfig cfg;
  TransportKind transport = TransportKind::InProcess;
  /// RTI listening address for the socket transport; port 0 picks a free one.
  SocketAddress rti_listen{"127.0.0.1", 0};
  std::chrono::milliseconds timeout{30000};
  bool record_trace = false;
};

struct ScenarioResult {
  ScenarioConfig cfg;
  std::vector<NodeDescriptor> nodes;
  FederationResult federation;
  SimTime run_end;

  std::vector<ExchangeRecord> exchanges;
  std::vector<IntervalMetrics> reliability;
  std::vector<DelayStats> delay;
  DdfReport ddf;
  std::uint64_t unknown_correlations = 0;
  std::uint64_t rate_updates = 0;

  std::array<std::uint64_t, kMessageClassCount> it_published{};
  /// Published by the IT federate but still held by the RTI at the end.
  std::array<std::uint64_t, kMessageClassCount> pending_to_net{};
  std::array<NetClassCounters, kMessageClassCount> net_counters{};
  std::array<std::uint64_t, kMessageClassCount> net_in_flight{};
  std::vector<LinkSample> link_samples;
  std::vector<LinkStats> link_stats;

  std::vector<DeliveryRecord> trace;
};

/// Builds the topology, runs the IT and network federates under one RTI
/// and evaluates the metrics. With the socket transport both federates run
/// on their own threads and talk to the RTI over TCP.
ScenarioResult run_scenario(const RunOptions& options);

/// Metrics of a finished run, computed from the IT federate's exchanges.
void evaluate_metrics(ScenarioResult& result);

struct SweepRow {
  double tau_s = 0.0;
  DdfReport ddf;
  /// Fastest of the repeated runs.
  double wallclock_s = 0.0;
};

/// One run per tau with everything else fixed. Each tau is run at least
/// `repeat` times, and cheap taus keep repeating until their runs add up to
/// `min_time_s`. The smallest wallclock is kept, which filters scheduler noise.
/// Throws UsageError for fewer than two taus.
std::vector<SweepRow> run_tau_sweep(const RunOptions& base, std::span<const double> taus,
                                    int repeat = 5, double min_time_s = 0.0);

} // namespace gridfed
