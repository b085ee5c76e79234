#include "gridfed/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridfed {

std::string_view to_string(Technology t) {
  return t == Technology::Lte ? "lte" : "dmr";
}

std::uint32_t segment_count(std::uint32_t payload_bytes, const TransportParams& tp) {
  if (payload_bytes == 0) return 1;
  return (payload_bytes + tp.mss_bytes - 1) / tp.mss_bytes;
}

std::vector<TransportFrame> segment_message(const SimMessage& msg, const TransportParams& tp,
                                            std::uint64_t& next_seq) {
  const auto n = segment_count(msg.payload_bytes, tp);
  std::vector<TransportFrame> frames;
  frames.reserve(n);
  std::uint32_t remaining = msg.payload_bytes;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto chunk = std::min(tp.mss_bytes, remaining);
    remaining -= chunk;
    frames.push_back(
        {msg.id, i, chunk + tp.header_bytes, FrameDirection::Data, msg.cls, next_seq++});
  }
  return frames;
}

std::uint64_t message_wire_bits(std::uint32_t payload_bytes, const TransportParams& tp) {
  const std::uint64_t n = segment_count(payload_bytes, tp);
  const std::uint64_t bytes = payload_bytes + n * tp.header_bytes + n * tp.ack_bytes;
  return bytes * 8;
}

SimTime transmission_time(std::uint64_t bytes, double capacity_bps) {
  const double ticks =
      static_cast<double>(bytes) * 8.0 * static_cast<double>(kTicksPerSecond) / capacity_bps;
  // Guard against 225000.00000000003-style representation noise.
  const double rounded = std::nearbyint(ticks);
  if (std::fabs(ticks - rounded) < 1e-9 * std::max(1.0, rounded))
    return SimTime(static_cast<Tick>(rounded));
  return SimTime(static_cast<Tick>(std::ceil(ticks)));
}

// FifoQueue

void FifoQueue::push(const TransportFrame& frame) {
  queue_.push_back(frame);
  bytes_[index_of(frame.cls)] += frame.bytes_on_wire;
}

TransportFrame FifoQueue::pop() {
  TransportFrame f = queue_.front();
  queue_.pop_front();
  bytes_[index_of(f.cls)] -= f.bytes_on_wire;
  return f;
}

std::vector<TransportFrame> FifoQueue::drain() {
  std::vector<TransportFrame> out(queue_.begin(), queue_.end());
  queue_.clear();
  bytes_ = {};
  return out;
}

// WfqQueue

WfqQueue::WfqQueue(std::array<double, kMessageClassCount> weights) : weights_(weights) {
  for (double w : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("WFQ weights must be positive");
  }
}

void WfqQueue::push(const TransportFrame& frame) {
  const auto c = index_of(frame.cls);
  const double start = std::max(virtual_time_, last_finish_[c]);
  const double finish = start + static_cast<double>(frame.bytes_on_wire) / weights_[c];
  last_finish_[c] = finish;
  queues_[c].push_back({frame, finish});
  bytes_[c] += frame.bytes_on_wire;
  ++size_;
}

TransportFrame WfqQueue::pop() {
  std::size_t best = kMessageClassCount;
  for (std::size_t c = 0; c < kMessageClassCount; ++c) {
    if (queues_[c].empty()) continue;
    if (best == kMessageClassCount) {
      best = c;
      continue;
    }
    const auto& a = queues_[c].front();
    const auto& b = queues_[best].front();
    if (a.finish < b.finish || (a.finish == b.finish && a.frame.seq < b.frame.seq)) best = c;
  }
  if (best == kMessageClassCount) throw std::logic_error("pop from empty WFQ");
  Tagged t = queues_[best].front();
  queues_[best].pop_front();
  virtual_time_ = t.finish;
  bytes_[best] -= t.frame.bytes_on_wire;
  --size_;
  return t.frame;
}

std::vector<TransportFrame> WfqQueue::drain() {
  std::vector<TransportFrame> out;
  for (auto& q : queues_) {
    for (auto& t : q) out.push_back(t.frame);
    q.clear();
  }
  bytes_ = {};
  size_ = 0;
  return out;
}

std::unique_ptr<QueueDiscipline> make_fifo() {
  return std::make_unique<FifoQueue>();
}

std::unique_ptr<QueueDiscipline> make_wfq(double w_monitoring, double w_control) {
  return std::make_unique<WfqQueue>(
      std::array<double, kMessageClassCount>{w_monitoring, w_control});
}

// Link

Link::Link(LinkId id, Technology tech, double capacity_bps, SimTime access_latency,
           std::unique_ptr<QueueDiscipline> discipline, std::uint64_t queue_limit_bytes)
    : id_(id),
      tech_(tech),
      capacity_bps_(capacity_bps),
      access_latency_(access_latency),
      discipline_(std::move(discipline)),
      queue_limit_bytes_(queue_limit_bytes) {
  if (!(capacity_bps_ > 0.0)) throw std::invalid_argument("link capacity must be positive");
}

std::uint64_t Link::queued_bytes(MessageClass c) const {
  return discipline_->queued_bytes(c);
}

bool Link::enqueue(const TransportFrame& frame) {
  stats_.bits_offered += std::uint64_t{frame.bytes_on_wire} * 8;
  if (queue_limit_bytes_ > 0) {
    const auto queued = discipline_->queued_bytes(MessageClass::Monitoring) +
                        discipline_->queued_bytes(MessageClass::Control);
    if (queued + frame.bytes_on_wire > queue_limit_bytes_) {
      ++stats_.frames_overflow;
      return false;
    }
  }
  ++stats_.frames_in;
  discipline_->push(frame);
  return true;
}

std::optional<std::pair<TransportFrame, SimTime>> Link::start_next(SimTime now) {
  if (!up_ || in_service_ || discipline_->empty()) return std::nullopt;
  in_service_ = discipline_->pop();
  service_started_ = now;
  return std::make_pair(*in_service_,
                        now + transmission_time(in_service_->bytes_on_wire, capacity_bps_));
}

TransportFrame Link::complete_transmission(SimTime now) {
  if (!in_service_) throw std::logic_error("no frame in service");
  TransportFrame f = *in_service_;
  in_service_.reset();
  stats_.busy_ticks += (now - service_started_).ticks();
  stats_.bits_transmitted += std::uint64_t{f.bytes_on_wire} * 8;
  propagating_.push_back(f);
  return f;
}

std::optional<TransportFrame> Link::complete_arrival(std::uint64_t seq) {
  // Propagation delay is fixed per link, so arrivals almost always match the front.
  auto it = std::find_if(propagating_.begin(), propagating_.end(),
                         [seq](const TransportFrame& f) { return f.seq == seq; });
  if (it == propagating_.end()) return std::nullopt;
  TransportFrame f = *it;
  propagating_.erase(it);
  ++stats_.frames_served;
  return f;
}

std::vector<TransportFrame> Link::fail(SimTime now) {
  up_ = false;
  std::vector<TransportFrame> lost = discipline_->drain();
  if (in_service_) {
    stats_.busy_ticks += (now - service_started_).ticks();
    lost.push_back(*in_service_);
    in_service_.reset();
  }
  lost.insert(lost.end(), propagating_.begin(), propagating_.end());
  propagating_.clear();
  stats_.frames_lost += lost.size();
  ++epoch_;
  return lost;
}

std::size_t Link::frames_in_flight() const {
  return discipline_->size() + (in_service_ ? 1 : 0) + propagating_.size();
}

} // namespace gridfed
