#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "gridfed/config.hpp"
#include "gridfed/message.hpp"
#include "gridfed/time.hpp"

namespace gridfed {

using LinkId = std::uint32_t;

enum class Technology { Lte, Dmr };
std::string_view to_string(Technology t);

enum class FrameDirection { Data, Ack };

struct TransportFrame {
  MessageId parent_msg_id = 0;
  std::uint32_t seg_index = 0;
  std::uint32_t bytes_on_wire = 0;
  FrameDirection direction = FrameDirection::Data;
  MessageClass cls = MessageClass::Monitoring;
  /// Per-federate unique sequence number; final tie-breaker for ordering.
  std::uint64_t seq = 0;
  bool operator==(const TransportFrame&) const = default;
};

struct TransportParams {
  std::uint32_t header_bytes = 40;
  std::uint32_t mss_bytes = 1460;
  std::uint32_t ack_bytes = 40;

  static TransportParams from(const ScenarioConfig& cfg) {
    return {cfg.header_bytes, cfg.mss_bytes, cfg.ack_bytes};
  }
};

/// Number of data segments for a payload (at least one).
std::uint32_t segment_count(std::uint32_t payload_bytes, const TransportParams& tp);

/// Data segments of `msg`: min(mss, remaining) payload plus one header each.
/// `next_seq` is advanced once per frame.
std::vector<TransportFrame> segment_message(const SimMessage& msg, const TransportParams& tp,
                                            std::uint64_t& next_seq);

/// Bits a message puts on the wire: every data segment plus one Ack each.
std::uint64_t message_wire_bits(std::uint32_t payload_bytes, const TransportParams& tp);

/// Serialization time of `bytes` at `capacity_bps`, rounded up to whole ticks
/// so a link never serves more than its capacity.
SimTime transmission_time(std::uint64_t bytes, double capacity_bps);

/// Queueing discipline of one link.
class QueueDiscipline {
 public:
  virtual ~QueueDiscipline() = default;
  virtual void push(const TransportFrame& frame) = 0;
  /// Removes the next frame to serve; requires !empty().
  virtual TransportFrame pop() = 0;
  virtual bool empty() const = 0;
  virtual std::size_t size() const = 0;
  virtual std::uint64_t queued_bytes(MessageClass c) const = 0;
  /// Removes and returns every queued frame.
  virtual std::vector<TransportFrame> drain() = 0;
};

/// Single shared first-come first-served queue.
class FifoQueue final : public QueueDiscipline {
 public:
  void push(const TransportFrame& frame) override;
  TransportFrame pop() override;
  bool empty() const override { return queue_.empty(); }
  std::size_t size() const override { return queue_.size(); }
  std::uint64_t queued_bytes(MessageClass c) const override { return bytes_[index_of(c)]; }
  std::vector<TransportFrame> drain() override;

 private:
  std::deque<TransportFrame> queue_;
  std::array<std::uint64_t, kMessageClassCount> bytes_{};
};

/// Weighted fair queueing with one FIFO per message class. Each frame gets a
/// virtual finish tag max(V, last tag of its class) + bytes / weight, where V
/// is the tag of the frame last selected for service (self-clocked virtual
/// time). The frame with the smallest tag is served next, so backlogged
/// classes share the link in proportion to their weights and no class with a
/// positive weight starves.
class WfqQueue final : public QueueDiscipline {
 public:
  /// Weights indexed by MessageClass; all must be positive.
  explicit WfqQueue(std::array<double, kMessageClassCount> weights);

  void push(const TransportFrame& frame) override;
  TransportFrame pop() override;
  bool empty() const override { return size_ == 0; }
  std::size_t size() const override { return size_; }
  std::uint64_t queued_bytes(MessageClass c) const override { return bytes_[index_of(c)]; }
  std::vector<TransportFrame> drain() override;

  double virtual_time() const { return virtual_time_; }

 private:
  struct Tagged {
    TransportFrame frame;
    double finish;
  };
  std::array<double, kMessageClassCount> weights_;
  std::array<std::deque<Tagged>, kMessageClassCount> queues_;
  std::array<double, kMessageClassCount> last_finish_{};
  std::array<std::uint64_t, kMessageClassCount> bytes_{};
  double virtual_time_ = 0.0;
  std::size_t size_ = 0;
};

std::unique_ptr<QueueDiscipline> make_fifo();
std::unique_ptr<QueueDiscipline> make_wfq(double w_monitoring, double w_control);

struct LinkStats {
  std::uint64_t frames_in = 0;       // accepted into the queue
  std::uint64_t frames_served = 0;   // transmitted and arrived at the receiver
  std::uint64_t frames_lost = 0;     // dropped by a failure
  std::uint64_t frames_overflow = 0; // rejected by the buffer limit
  std::uint64_t bits_offered = 0;
  std::uint64_t bits_transmitted = 0;
  Tick busy_ticks = 0;
};

/// A capacity-limited channel shared by both directions of traffic. The
/// link is work-conserving: whenever a frame is queued it is either in
/// service or the link is busy with another frame.
class Link {
 public:
  Link(LinkId id, Technology tech, double capacity_bps, SimTime access_latency,
       std::unique_ptr<QueueDiscipline> discipline, std::uint64_t queue_limit_bytes = 0);

  LinkId id() const { return id_; }
  Technology technology() const { return tech_; }
  double capacity_bps() const { return capacity_bps_; }
  SimTime access_latency() const { return access_latency_; }
  bool up() const { return up_; }
  bool busy() const { return in_service_.has_value(); }
  const QueueDiscipline& queue() const { return *discipline_; }
  const LinkStats& stats() const { return stats_; }
  /// Incremented by every failure; events scheduled before it are stale.
  std::uint64_t epoch() const { return epoch_; }

  /// Adds a frame to its queue. Returns false when the buffer limit rejects it.
  bool enqueue(const TransportFrame& frame);

  /// Starts serving the next frame if idle. Returns the frame and the tick
  /// its transmission completes.
  std::optional<std::pair<TransportFrame, SimTime>> start_next(SimTime now);

  /// Completes the frame in service; it now propagates to the receiver.
  TransportFrame complete_transmission(SimTime now);

  /// The propagating frame with `seq` reached the receiver. Returns nullopt
  /// if it was lost in the meantime.
  std::optional<TransportFrame> complete_arrival(std::uint64_t seq);

  /// Takes the link down; every queued, in-service or propagating frame is
  /// lost and returned.
  std::vector<TransportFrame> fail(SimTime now);
  void restore() { up_ = true; }

  /// Frames inside the link: queued, in service, or propagating.
  std::size_t frames_in_flight() const;
  std::uint64_t queued_bytes(MessageClass c) const;

 private:
  LinkId id_;
  Technology tech_;
  double capacity_bps_;
  SimTime access_latency_;
  std::unique_ptr<QueueDiscipline> discipline_;
  std::uint64_t queue_limit_bytes_;
  bool up_ = true;
  std::optional<TransportFrame> in_service_;
  SimTime service_started_;
  std::deque<TransportFrame> propagating_;
  LinkStats stats_;
  std::uint64_t epoch_ = 0;
};

} // namespace gridfed
