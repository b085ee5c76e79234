#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "gridfed/config.hpp"
#include "gridfed/federate.hpp"
#include "gridfed/link.hpp"
#include "gridfed/topology.hpp"

namespace gridfed {

/// Ids of messages created by the network federate carry this bit so they
/// never collide with ids issued by the IT federate.
inline constexpr MessageId kNetMessageIdBase = MessageId{1} << 63;

enum class FailureKind { LteAllDown, LteRestore };

struct FailureEvent {
  FailureKind kind = FailureKind::LteAllDown;
  SimTime at;
};

/// Per-node monitoring rate that keeps the monitoring load on the DMR
/// channel within (1 - alpha_e) of its capacity:
///   (1 - alpha_e) * c_dmr / (n_monitored * exchange_bits).
/// With `cfg.ra_literal_formula` the literal form
///   (1 / n) * T_total / ((1 - alpha_e) * c_dmr),  T_total = n * exchange_bits * lambda_m
/// is returned instead. Throws ValidationError if exchange_bits is zero.
double rate_adaptation_rate(const ScenarioConfig& cfg, std::uint32_t n_monitored,
                            double exchange_bits);

/// Bits of one monitoring exchange with `node_kind`: request and response,
/// headers and Acks included.
std::uint64_t monitoring_exchange_bits(const ScenarioConfig& cfg, NodeKind node_kind);

struct NetClassCounters {
  std::uint64_t received = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost_to_failure = 0;
  std::uint64_t dropped_no_route = 0;
  std::uint64_t dropped_overflow = 0;
};

/// Link state at the end of one metrics interval.
struct LinkSample {
  SimTime t;
  LinkId link = 0;
  std::uint64_t queue_bytes_monitoring = 0;
  std::uint64_t queue_bytes_control = 0;
  /// Bits transmitted and offered during the interval ending at `t`.
  std::uint64_t bits_served = 0;
  std::uint64_t bits_offered = 0;
};

/// The communication perspective. Messages handed over by the RTI are
/// routed to one link, split into segments, queued and transmitted; each
/// data segment that reaches the receiver triggers an Ack on the same link.
/// A message is delivered when its last data segment arrives and is
/// published back with its network timestamps filled in. Acks only occupy
/// link capacity.
///
/// Link 0 is the DMR channel, links 1..k the LTE base stations in topology
/// order.
class NetFederate final : public Federate {
 public:
  NetFederate(const ScenarioConfig& cfg, const Topology& topo);

  StepResult step(const Grant& grant, std::span<const Delivery> inbox) override;

  /// Link a message would take now, or nullopt when nothing is up.
  std::optional<LinkId> route(const SimMessage& msg) const;

  /// Schedules a failure or restore; events past the run horizon never fire.
  void inject_failure(const FailureEvent& event);

  /// Forces a link up or down immediately (test hook).
  void set_link_state(LinkId id, bool up, SimTime now);

  static constexpr LinkId kDmrLink = 0;
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_.at(id); }

  const NetClassCounters& counters(MessageClass c) const { return counters_[index_of(c)]; }
  std::uint64_t in_flight(MessageClass c) const;
  const std::vector<LinkSample>& samples() const { return samples_; }
  std::uint64_t unexpected_messages() const { return unexpected_; }
  bool rate_adaptation_active() const { return ra_active_; }
  /// Rate and period announced on failover (rate adaptation only).
  double adapted_rate_hz() const { return adapted_rate_hz_; }
  SimTime adapted_period() const { return adapted_period_; }

 private:
  enum class EventType : std::uint8_t { LinkState = 0, TxComplete = 1, Arrival = 2, Inject = 3 };

  struct Event {
    Tick t = 0;
    EventType type = EventType::Inject;
    LinkId link = 0;
    std::uint64_t seq = 0;
    std::uint64_t epoch = 0;
    FailureKind failure = FailureKind::LteAllDown;
    std::size_t inject_index = 0;

    // Min-heap order: (tick, type, link, seq).
    bool operator>(const Event& o) const {
      if (t != o.t) return t > o.t;
      if (type != o.type) return type > o.type;
      if (link != o.link) return link > o.link;
      return seq > o.seq;
    }
  };

  struct Transit {
    SimMessage msg;
    LinkId link = 0;
    std::uint32_t segments = 0;
    std::uint32_t segments_arrived = 0;
  };

  void run_until(SimTime end);
  void inject(const SimMessage& msg, SimTime now);
  void kick(LinkId id, SimTime now);
  void on_tx_complete(const Event& e);
  void on_arrival(const Event& e);
  void apply_failure(FailureKind kind, SimTime now);
  void lose_frames(const std::vector<TransportFrame>& frames);
  void publish_rate_update(SimTime period, SimTime now);
  void take_samples(SimTime t);

  ScenarioConfig cfg_;
  const Topology& topo_;
  TransportParams transport_;
  SimTime duration_;
  std::vector<Link> links_;
  /// Per node, LTE link ids ordered by distance.
  std::vector<std::vector<LinkId>> lte_preference_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<SimMessage> pending_inject_;
  std::unordered_map<MessageId, Transit> transit_;
  std::array<NetClassCounters, kMessageClassCount> counters_{};
  std::vector<Publication> outbox_;
  std::vector<LinkSample> samples_;
  std::vector<LinkStats> last_sample_stats_;

  std::uint64_t next_frame_seq_ = 0;
  std::uint64_t next_event_seq_ = 0;
  MessageId next_msg_id_ = kNetMessageIdBase;
  std::uint64_t unexpected_ = 0;
  bool ra_active_ = false;
  double adapted_rate_hz_ = 0.0;
  SimTime adapted_period_;
};

} // namespace gridfed
