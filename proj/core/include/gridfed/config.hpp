#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "gridfed/message.hpp"
#include "gridfed/time.hpp"

namespace gridfed {

enum class QosMode { Fifo, Wfq, WfqRa };
enum class ArrivalProcess { Periodic, Poisson };
enum class DerControlVia { Lte, Dmr };

std::string_view to_string(QosMode q);
std::optional<QosMode> qos_from_string(std::string_view s);

/// Average payload lengths in bytes, per message origin.
struct PayloadTable {
  std::uint32_t dms_monitoring = 64;
  std::uint32_t dms_control = 184;
  std::uint32_t hvalv = 500;
  std::uint32_t substation = 5000;
  std::uint32_t der = 224;
  std::uint32_t switch_ack = 100;

  bool operator==(const PayloadTable&) const = default;
};

/// Number of nodes of each kind placed by the topology generator.
struct TopologyCounts {
  std::uint32_t hvalv = 332;
  std::uint32_t switches = 26;
  std::uint32_t substation = 1;
  std::uint32_t pv = 1;
  std::uint32_t wind = 1;
  std::uint32_t dms = 1;
  std::uint32_t dmr_ap = 1;

  bool operator==(const TopologyCounts&) const = default;
};

/// Full description of one federation run. Defaults reproduce the
/// telecontrol case study (two 50 kbps LTE cells, one 1.92 kbps DMR channel).
struct ScenarioConfig {
  double tau_s = 0.01;
  double duration_s = 1600.0;
  std::uint64_t seed = 1;

  double lambda_m_hz = 1.0 / 30.0;
  double lambda_c_hz = 2.0 / 600.0;
  std::uint32_t control_burst_size = 2;
  ArrivalProcess arrivals = ArrivalProcess::Periodic;

  PayloadTable payload;

  double delay_limit_monitoring_s = 30.0;
  double delay_limit_control_s = 10.0;

  std::uint32_t lte_bs_count = 2;
  double lte_bs_capacity_bps = 50000.0;
  double dmr_capacity_bps = 1920.0;
  double access_latency_lte_s = 0.020;
  double access_latency_dmr_s = 0.050;

  QosMode qos = QosMode::Fifo;
  double wfq_weight_monitoring = 0.1;
  double wfq_weight_control = 0.9;
  double alpha_e = 0.3;
  bool ra_literal_formula = false;

  std::optional<double> lte_fail_at_s;
  std::optional<double> lte_restore_at_s;

  double metrics_interval_s = 25.0;

  TopologyCounts counts;
  double region_side_km = 15.0;

  std::uint32_t header_bytes = 40;
  std::uint32_t mss_bytes = 1460;
  std::uint32_t ack_bytes = 40;
  /// Per-link buffer limit in bytes; 0 means unbounded.
  std::uint64_t queue_limit_bytes = 0;

  DerControlVia der_control_via = DerControlVia::Lte;
  double der_control_rate_hz = 0.0;

  bool operator==(const ScenarioConfig&) const = default;

  // Derived exact quantities. Valid only after validate().
  SimTime tau() const;
  SimTime duration() const;
  SimTime metrics_interval() const;
  SimTime delay_limit(MessageClass c) const;
  std::optional<SimTime> lte_fail_at() const;
  std::optional<SimTime> lte_restore_at() const;
  std::uint32_t monitored_count() const {
    return counts.hvalv + counts.substation + counts.pv + counts.wind;
  }
};

/// Checks every invariant; throws ValidationError naming the first bad key.
void validate(const ScenarioConfig& cfg);

/// Parses the flat `key = value` format. Unspecified keys keep their
/// defaults. Throws ParseError or ValidationError.
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::filesystem::path& path);

/// Writes every key in a stable order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

/// Sets one key from its textual value, as the file parser does.
void apply_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);

} // namespace gridfed
