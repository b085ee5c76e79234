#include "gridfed/net_federate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gridfed/errors.hpp"

namespace gridfed {

double rate_adaptation_rate(const ScenarioConfig& cfg, std::uint32_t n_monitored,
                            double exchange_bits) {
  if (!(exchange_bits > 0.0)) throw ValidationError("exchange_bits", "must be positive");
  if (n_monitored == 0) throw ValidationError("n_monitored", "must be positive");
  const double usable = (1.0 - cfg.alpha_e) * cfg.dmr_capacity_bps;
  const double n = static_cast<double>(n_monitored);
  if (cfg.ra_literal_formula) {
    const double total_bps = n * exchange_bits * cfg.lambda_m_hz;
    return (1.0 / n) * total_bps / usable;
  }
  return usable / (n * exchange_bits);
}

std::uint64_t monitoring_exchange_bits(const ScenarioConfig& cfg, NodeKind node_kind) {
  const auto tp = TransportParams::from(cfg);
  return message_wire_bits(cfg.payload.dms_monitoring, tp) +
         message_wire_bits(response_payload_bytes(cfg.payload, node_kind), tp);
}

NetFederate::NetFederate(const ScenarioConfig& cfg, const Topology& topo)
    : cfg_(cfg), topo_(topo), transport_(TransportParams::from(cfg)), duration_(cfg.duration()) {
  std::unique_ptr<QueueDiscipline> dmr_queue;
  if (cfg_.qos == QosMode::Fifo) {
    dmr_queue = make_fifo();
  } else {
    dmr_queue = make_wfq(cfg_.wfq_weight_monitoring, cfg_.wfq_weight_control);
  }
  links_.emplace_back(kDmrLink, Technology::Dmr, cfg_.dmr_capacity_bps,
                      SimTime::from_seconds(cfg_.access_latency_dmr_s, "access_latency_dmr_s"),
                      std::move(dmr_queue), cfg_.queue_limit_bytes);
  const auto lte_latency = SimTime::from_seconds(cfg_.access_latency_lte_s, "access_latency_lte_s");
  for (std::size_t b = 0; b < topo_.base_stations().size(); ++b) {
    links_.emplace_back(static_cast<LinkId>(b + 1), Technology::Lte, cfg_.lte_bs_capacity_bps,
                        lte_latency, make_fifo(), cfg_.queue_limit_bytes);
  }
  last_sample_stats_.resize(links_.size());

  lte_preference_.resize(topo_.nodes().size());
  for (const auto& n : topo_.nodes()) {
    std::vector<std::pair<double, LinkId>> by_distance;
    for (std::size_t b = 0; b < topo_.base_stations().size(); ++b) {
      const auto& p = topo_.node(topo_.base_stations()[b]).position;
      const double dx = p.x_km - n.position.x_km;
      const double dy = p.y_km - n.position.y_km;
      by_distance.emplace_back(dx * dx + dy * dy, static_cast<LinkId>(b + 1));
    }
    std::stable_sort(by_distance.begin(), by_distance.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [d, id] : by_distance) lte_preference_[n.id].push_back(id);
  }

  if (cfg_.qos == QosMode::WfqRa && !topo_.monitored().empty()) {
    double total_bits = 0.0;
    for (NodeId id : topo_.monitored()) {
      total_bits += static_cast<double>(monitoring_exchange_bits(cfg_, topo_.node(id).kind));
    }
    const auto n = static_cast<std::uint32_t>(topo_.monitored().size());
    adapted_rate_hz_ = rate_adaptation_rate(cfg_, n, total_bits / n);
    // Round the period up so the adapted load never exceeds the budget.
    const double ticks = std::ceil(static_cast<double>(kTicksPerSecond) / adapted_rate_hz_);
    adapted_period_ = SimTime(static_cast<Tick>(ticks));
  }

  if (auto t = cfg_.lte_fail_at()) inject_failure({FailureKind::LteAllDown, *t});
  if (auto t = cfg_.lte_restore_at()) inject_failure({FailureKind::LteRestore, *t});
}

void NetFederate::inject_failure(const FailureEvent& event) {
  Event e;
  e.t = event.at.ticks();
  e.type = EventType::LinkState;
  e.seq = next_event_seq_++;
  e.failure = event.kind;
  events_.push(e);
}

std::optional<LinkId> NetFederate::route(const SimMessage& msg) const {
  const NodeId node = msg.src == topo_.dms() ? msg.dst : msg.src;
  bool via_lte = msg.cls == MessageClass::Monitoring;
  if (!via_lte && cfg_.der_control_via == DerControlVia::Lte && node < topo_.nodes().size() &&
      is_der(topo_.node(node).kind)) {
    via_lte = true;
  }
  if (via_lte && node < lte_preference_.size()) {
    for (LinkId id : lte_preference_[node]) {
      if (links_[id].up()) return id;
    }
  }
  if (links_[kDmrLink].up()) return kDmrLink;
  return std::nullopt;
}

std::uint64_t NetFederate::in_flight(MessageClass c) const {
  return static_cast<std::uint64_t>(std::count_if(
      transit_.begin(), transit_.end(), [c](const auto& kv) { return kv.second.msg.cls == c; }));
}

StepResult NetFederate::step(const Grant& grant, std::span<const Delivery> inbox) {
  for (const auto& d : inbox) {
    if (!d.msg.is_network_traffic()) {
      ++unexpected_;
      continue;
    }
    Event e;
    e.t = d.at.ticks();
    e.type = EventType::Inject;
    e.seq = next_event_seq_++;
    e.inject_index = pending_inject_.size();
    pending_inject_.push_back(d.msg);
    events_.push(e);
  }
  run_until(grant.end);
  pending_inject_.clear();
  if (grant.end.ticks() % cfg_.metrics_interval().ticks() == 0) take_samples(grant.end);

  StepResult result;
  result.outbox = std::move(outbox_);
  outbox_.clear();
  result.done = grant.end > duration_;
  return result;
}

void NetFederate::run_until(SimTime end) {
  while (!events_.empty() && events_.top().t < end.ticks()) {
    const Event e = events_.top();
    events_.pop();
    switch (e.type) {
      case EventType::LinkState:
        apply_failure(e.failure, SimTime(e.t));
        break;
      case EventType::TxComplete:
        on_tx_complete(e);
        break;
      case EventType::Arrival:
        on_arrival(e);
        break;
      case EventType::Inject:
        inject(pending_inject_.at(e.inject_index), SimTime(e.t));
        break;
    }
  }
}

void NetFederate::inject(const SimMessage& msg, SimTime now) {
  auto& counters = counters_[index_of(msg.cls)];
  ++counters.received;
  const auto link_id = route(msg);
  if (!link_id) {
    ++counters.dropped_no_route;
    return;
  }
  Transit tr;
  tr.msg = msg;
  tr.msg.sent_at_comm = now;
  tr.link = *link_id;
  auto frames = segment_message(msg, transport_, next_frame_seq_);
  tr.segments = static_cast<std::uint32_t>(frames.size());
  auto& link = links_[*link_id];
  bool accepted = true;
  for (const auto& f : frames) accepted = link.enqueue(f) && accepted;
  if (!accepted) {
    ++counters.dropped_overflow;
  } else {
    transit_.emplace(msg.id, std::move(tr));
  }
  kick(*link_id, now);
}

void NetFederate::kick(LinkId id, SimTime now) {
  auto& link = links_[id];
  if (auto started = link.start_next(now)) {
    Event e;
    e.t = started->second.ticks();
    e.type = EventType::TxComplete;
    e.link = id;
    e.seq = started->first.seq;
    e.epoch = link.epoch();
    events_.push(e);
  }
}

void NetFederate::on_tx_complete(const Event& e) {
  auto& link = links_[e.link];
  if (e.epoch != link.epoch()) return;
  const SimTime now(e.t);
  const auto frame = link.complete_transmission(now);
  Event arrival;
  arrival.t = (now + link.access_latency()).ticks();
  arrival.type = EventType::Arrival;
  arrival.link = e.link;
  arrival.seq = frame.seq;
  arrival.epoch = link.epoch();
  events_.push(arrival);
  kick(e.link, now);
}

void NetFederate::on_arrival(const Event& e) {
  auto& link = links_[e.link];
  if (e.epoch != link.epoch()) return;
  const SimTime now(e.t);
  const auto frame = link.complete_arrival(e.seq);
  if (!frame || frame->direction == FrameDirection::Ack) return;

  // Every data segment is acknowledged on the same link, whether or not its
  // message can still be delivered.
  TransportFrame ack{frame->parent_msg_id, frame->seg_index, transport_.ack_bytes,
                     FrameDirection::Ack,  frame->cls,       next_frame_seq_++};
  link.enqueue(ack);
  kick(e.link, now);

  auto it = transit_.find(frame->parent_msg_id);
  if (it == transit_.end()) return;
  auto& tr = it->second;
  if (++tr.segments_arrived < tr.segments) return;
  SimMessage msg = std::move(tr.msg);
  transit_.erase(it);
  msg.delivered_at_comm = now;
  ++counters_[index_of(msg.cls)].delivered;
  outbox_.push_back({std::move(msg), now});
}

void NetFederate::apply_failure(FailureKind kind, SimTime now) {
  if (now > duration_) return;
  if (kind == FailureKind::LteAllDown) {
    for (auto& link : links_) {
      if (link.technology() != Technology::Lte || !link.up()) continue;
      lose_frames(link.fail(now));
    }
    if (cfg_.qos == QosMode::WfqRa && adapted_rate_hz_ > 0.0) {
      ra_active_ = true;
      publish_rate_update(adapted_period_, now);
    }
  } else {
    for (auto& link : links_) {
      if (link.technology() == Technology::Lte) link.restore();
    }
    if (ra_active_) {
      ra_active_ = false;
      const double ticks = std::round(static_cast<double>(kTicksPerSecond) / cfg_.lambda_m_hz);
      publish_rate_update(SimTime(static_cast<Tick>(ticks)), now);
    }
  }
}

void NetFederate::set_link_state(LinkId id, bool up, SimTime now) {
  auto& link = links_.at(id);
  if (up) {
    link.restore();
    kick(id, now);
  } else if (link.up()) {
    lose_frames(link.fail(now));
  }
}

void NetFederate::lose_frames(const std::vector<TransportFrame>& frames) {
  for (const auto& f : frames) {
    auto it = transit_.find(f.parent_msg_id);
    if (it == transit_.end()) continue;
    ++counters_[index_of(it->second.msg.cls)].lost_to_failure;
    transit_.erase(it);
  }
}

void NetFederate::publish_rate_update(SimTime period, SimTime now) {
  SimMessage m;
  m.id = next_msg_id_++;
  m.cls = MessageClass::Monitoring;
  m.src = topo_.dmr_access_point();
  m.dst = topo_.dms();
  m.payload_bytes = 1;
  m.kind = MessageKind::RateUpdate;
  m.created_at_it = now;
  m.poll_period = period;
  outbox_.push_back({std::move(m), now});
}

void NetFederate::take_samples(SimTime t) {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& link = links_[i];
    const auto& now = link.stats();
    auto& prev = last_sample_stats_[i];
    samples_.push_back({t, link.id(), link.queued_bytes(MessageClass::Monitoring),
                        link.queued_bytes(MessageClass::Control),
                        now.bits_transmitted - prev.bits_transmitted,
                        now.bits_offered - prev.bits_offered});
    prev = now;
  }
}

} // namespace gridfed
