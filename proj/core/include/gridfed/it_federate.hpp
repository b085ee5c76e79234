#pragma once

#include <array>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <vector>

#include "gridfed/config.hpp"
#include "gridfed/exchange.hpp"
#include "gridfed/federate.hpp"
#include "gridfed/metrics.hpp"
#include "gridfed/random.hpp"
#include "gridfed/topology.hpp"

namespace gridfed {

/// Poll and command timing of the DMS.
struct PollingSchedule {
  SimTime poll_period;
  /// First poll of each monitored node, in Topology::monitored() order.
  std::vector<SimTime> phase;
  SimTime burst_period;
  std::uint32_t burst_size = 0;
  /// Zero when DER setpoints are disabled.
  SimTime der_control_period;

  static PollingSchedule from(const ScenarioConfig& cfg, const Topology& topo);
};

/// The IT perspective: the DMS polls every monitored node, sends control
/// bursts to switches and optional setpoints to DERs, and the nodes answer
/// every request they receive in the same slot. All traffic goes through
/// the network federate; the IT side only sees it again once delivered.
class ItFederate final : public Federate {
 public:
  ItFederate(const ScenarioConfig& cfg, const Topology& topo);

  StepResult step(const Grant& grant, std::span<const Delivery> inbox) override;

  /// DMS-originated messages due in [start, end), stamped at their due tick.
  std::vector<SimMessage> generate_slot_traffic(SimTime start, SimTime end);

  /// Handles one delivered message and returns what the receiving node
  /// answers (stamped `now`).
  std::vector<SimMessage> on_deliver(const SimMessage& msg, SimTime now);

  /// Reliability of both classes in interval `i`, scoring only what is
  /// resolved by `run_end`.
  std::array<IntervalMetrics, kMessageClassCount> snapshot_reliability(IntervalIndex i,
                                                                       SimTime run_end) const;

  const PollingSchedule& schedule() const { return schedule_; }
  const std::vector<ExchangeRecord>& exchanges() const { return exchanges_; }
  std::uint64_t unknown_correlations() const { return unknown_correlations_; }
  std::uint64_t published(MessageClass c) const { return published_[index_of(c)]; }
  SimTime current_poll_period() const { return poll_period_; }
  std::uint64_t rate_updates() const { return rate_updates_; }

 private:
  struct Due {
    Tick t;
    NodeId node;
    bool operator>(const Due& o) const { return t != o.t ? t > o.t : node > o.node; }
  };

  SimMessage make_request(NodeId node, MessageClass cls, SimTime at);
  void rephase(SimTime now);
  Tick next_poll_after(Tick t);

  ScenarioConfig cfg_;
  const Topology& topo_;
  PollingSchedule schedule_;
  SimTime duration_;
  SimTime poll_period_;
  Rng poll_rng_;
  Rng control_rng_;

  std::priority_queue<Due, std::vector<Due>, std::greater<>> polls_;
  std::int64_t next_burst_ = 1;
  std::int64_t next_der_command_ = 1;

  std::vector<ExchangeRecord> exchanges_;
  std::unordered_map<MessageId, std::size_t> by_request_;
  MessageId next_id_ = 1;
  std::array<std::uint64_t, kMessageClassCount> published_{};
  std::uint64_t unknown_correlations_ = 0;
  std::uint64_t rate_updates_ = 0;
};

} // namespace gridfed
