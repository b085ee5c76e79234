#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gridfed/exchange.hpp"
#include "gridfed/message.hpp"
#include "gridfed/time.hpp"

namespace gridfed {

/// Fraction of `exchanges` answered within `limit`. Unanswered exchanges
/// count as failures. Empty input has no reliability.
std::optional<double> node_reliability(std::span<const ExchangeRecord> exchanges, SimTime limit);

struct ClassReliability {
  double mean = 0.0;
  /// 1.96 * sample standard deviation / sqrt(n); zero for a single node.
  double ci_half_width = 0.0;
};

/// Mean and 95% confidence half-width over per-node reliabilities. Throws
/// EmptyDistribution on empty input.
ClassReliability class_reliability_ci(std::span<const double> per_node);
ClassReliability class_reliability_ci(const std::map<NodeId, double>& per_node);

struct DelayPair {
  double d_it_s = 0.0;
  double d_comm_s = 0.0;
};

struct DdfReport {
  double tau_s = 0.0;
  std::size_t message_count = 0;
  double ddf_percent = 0.0;
  double mean_abs_gap_s = 0.0;
  /// Pairs skipped because their comm delay was zero.
  std::size_t zero_comm_excluded = 0;
};

/// 100 * mean((d_it - d_comm) / d_comm). With no usable pair the report
/// has message_count 0 and ddf_percent 0.
DdfReport ddf(std::span<const DelayPair> pairs, double tau_s = 0.0);

/// Delay pairs of every answered exchange that carries network timestamps.
std::vector<DelayPair> delay_pairs(std::span<const ExchangeRecord> exchanges);

struct IntervalMetrics {
  IntervalIndex interval = 0;
  MessageClass cls = MessageClass::Monitoring;
  std::map<NodeId, double> per_node_reliability;
  std::optional<double> mean;
  double ci_half_width = 0.0;
  std::size_t sample_count = 0;

  double ci_low() const { return mean.value_or(0.0) - ci_half_width; }
  double ci_high() const { return mean.value_or(0.0) + ci_half_width; }
  double clamped_low() const;
  double clamped_high() const;
};

/// Window a resolved exchange is scored in: the interval containing its
/// response if that arrived within the limit, otherwise the interval
/// containing created + limit, the moment it failed. Intervals are
/// (i*W, (i+1)*W]. Unresolved exchanges (unanswered, limit not yet passed
/// at `run_end`) have none.
std::optional<IntervalIndex> outcome_interval(const ExchangeRecord& ex, SimTime limit,
                                              SimTime interval, SimTime run_end);

/// Interval index of time t under the (i*W, (i+1)*W] convention.
constexpr IntervalIndex interval_of(SimTime t, SimTime interval) {
  return t.ticks() <= 0 ? 0 : (t.ticks() - 1) / interval.ticks();
}

/// Number of reporting intervals covering [0, run_end].
IntervalIndex interval_count(SimTime run_end, SimTime interval);

/// Per-interval, per-class reliability (entries ordered by interval, then
/// class). Classes without exchanges in an interval get an absent mean.
std::vector<IntervalMetrics> reliability_series(std::span<const ExchangeRecord> exchanges,
                                                std::array<SimTime, kMessageClassCount> limits,
                                                SimTime interval, SimTime run_end);

/// Network delay of one message leg.
struct LegDelay {
  MessageClass cls = MessageClass::Monitoring;
  SimTime sent_at_comm;
  SimTime delay;
};

/// Legs of every exchange that crossed the network.
std::vector<LegDelay> leg_delays(std::span<const ExchangeRecord> exchanges);

struct DelayStats {
  IntervalIndex interval = 0;
  MessageClass cls = MessageClass::Monitoring;
  std::size_t count = 0;
  double mean_s = 0.0;
  double p95_s = 0.0;
};

/// Nearest-rank percentile of `values` (sorted in place); q in (0, 1].
double percentile_nearest_rank(std::vector<double>& values, double q);

/// Per-interval, per-class delay statistics, bucketed by the interval in
/// which each leg entered the network.
std::vector<DelayStats> delay_series(std::span<const LegDelay> legs, SimTime interval,
                                     SimTime run_end);

} // namespace gridfed
