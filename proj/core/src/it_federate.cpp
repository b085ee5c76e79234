#include "gridfed/it_federate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridfed {

namespace {

constexpr std::uint64_t kPhaseStream = 0x17;
constexpr std::uint64_t kArrivalStream = 0x18;
constexpr std::uint64_t kControlStream = 0x2c;

Tick seconds_to_ticks(double s) {
  return static_cast<Tick>(std::llround(s * static_cast<double>(kTicksPerSecond)));
}

} // namespace

PollingSchedule PollingSchedule::from(const ScenarioConfig& cfg, const Topology& topo) {
  PollingSchedule s;
  s.poll_period = SimTime(std::max<Tick>(1, seconds_to_ticks(1.0 / cfg.lambda_m_hz)));
  Rng rng(cfg.seed, kPhaseStream);
  for (std::size_t i = 0; i < topo.monitored().size(); ++i) {
    if (cfg.arrivals == ArrivalProcess::Periodic) {
      s.phase.emplace_back(
          static_cast<Tick>(rng.below(static_cast<std::uint64_t>(s.poll_period.ticks()))));
    } else {
      s.phase.emplace_back(seconds_to_ticks(rng.exponential(cfg.lambda_m_hz)));
    }
  }
  if (cfg.lambda_c_hz > 0.0) {
    s.burst_size = cfg.control_burst_size;
    s.burst_period = SimTime(std::max<Tick>(
        1, seconds_to_ticks(static_cast<double>(cfg.control_burst_size) / cfg.lambda_c_hz)));
  }
  if (cfg.der_control_rate_hz > 0.0) {
    s.der_control_period =
        SimTime(std::max<Tick>(1, seconds_to_ticks(1.0 / cfg.der_control_rate_hz)));
  }
  return s;
}

ItFederate::ItFederate(const ScenarioConfig& cfg, const Topology& topo)
    : cfg_(cfg),
      topo_(topo),
      schedule_(PollingSchedule::from(cfg, topo)),
      duration_(cfg.duration()),
      poll_period_(schedule_.poll_period),
      poll_rng_(cfg.seed, kArrivalStream),
      control_rng_(cfg.seed, kControlStream) {
  const auto& monitored = topo_.monitored();
  for (std::size_t i = 0; i < monitored.size(); ++i) {
    polls_.push({schedule_.phase[i].ticks(), monitored[i]});
  }
}

Tick ItFederate::next_poll_after(Tick t) {
  if (cfg_.arrivals == ArrivalProcess::Periodic) return t + poll_period_.ticks();
  const double rate =
      static_cast<double>(kTicksPerSecond) / static_cast<double>(poll_period_.ticks());
  return t + std::max<Tick>(1, seconds_to_ticks(poll_rng_.exponential(rate)));
}

SimMessage ItFederate::make_request(NodeId node, MessageClass cls, SimTime at) {
  SimMessage m;
  m.id = next_id_++;
  m.cls = cls;
  m.src = topo_.dms();
  m.dst = node;
  if (cls == MessageClass::Monitoring) {
    m.payload_bytes = cfg_.payload.dms_monitoring;
    m.kind = MessageKind::Request;
  } else {
    m.payload_bytes = cfg_.payload.dms_control;
    m.kind = MessageKind::ControlCommand;
  }
  m.created_at_it = at;

  ExchangeRecord ex;
  ex.request = m;
  ex.node = node;
  ex.cls = cls;
  by_request_.emplace(m.id, exchanges_.size());
  exchanges_.push_back(std::move(ex));
  return m;
}

std::vector<SimMessage> ItFederate::generate_slot_traffic(SimTime start, SimTime end) {
  std::vector<SimMessage> out;

  while (!polls_.empty() && polls_.top().t < end.ticks()) {
    const Due d = polls_.top();
    polls_.pop();
    const SimTime at(std::max(d.t, start.ticks()));
    out.push_back(make_request(d.node, MessageClass::Monitoring, at));
    polls_.push({next_poll_after(d.t), d.node});
  }

  const auto& switches = topo_.switches();
  while (schedule_.burst_size > 0 && !switches.empty() &&
         schedule_.burst_period * next_burst_ < end) {
    const SimTime at = std::max(schedule_.burst_period * next_burst_, start);
    // Partial Fisher-Yates: the first k entries become k distinct switches.
    std::vector<NodeId> pool(switches.begin(), switches.end());
    const auto k = std::min<std::size_t>(schedule_.burst_size, pool.size());
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + control_rng_.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.push_back(make_request(pool[i], MessageClass::Control, at));
    }
    ++next_burst_;
  }

  const auto& ders = topo_.ders();
  while (schedule_.der_control_period.ticks() > 0 && !ders.empty() &&
         schedule_.der_control_period * next_der_command_ < end) {
    const SimTime at = std::max(schedule_.der_control_period * next_der_command_, start);
    const auto target = ders[static_cast<std::size_t>(next_der_command_ - 1) % ders.size()];
    out.push_back(make_request(target, MessageClass::Control, at));
    ++next_der_command_;
  }

  std::stable_sort(out.begin(), out.end(), [](const SimMessage& a, const SimMessage& b) {
    return a.created_at_it < b.created_at_it;
  });
  return out;
}

void ItFederate::rephase(SimTime now) {
  const auto& monitored = topo_.monitored();
  const auto n = static_cast<Tick>(monitored.size());
  polls_ = {};
  for (Tick k = 0; k < n; ++k) {
    const Tick offset = (k + 1) * poll_period_.ticks() / n;
    polls_.push({now.ticks() + std::max<Tick>(offset, 0), monitored[static_cast<std::size_t>(k)]});
  }
}

std::vector<SimMessage> ItFederate::on_deliver(const SimMessage& msg, SimTime now) {
  std::vector<SimMessage> out;
  switch (msg.kind) {
    case MessageKind::RateUpdate:
      if (msg.poll_period && msg.poll_period->ticks() > 0) {
        poll_period_ = *msg.poll_period;
        ++rate_updates_;
        rephase(now);
      }
      break;

    case MessageKind::Request:
    case MessageKind::ControlCommand: {
      auto it = by_request_.find(msg.id);
      if (it == by_request_.end()) {
        ++unknown_correlations_;
        break;
      }
      auto& ex = exchanges_[it->second];
      ex.request = msg;
      ex.request.delivered_at_it = now;

      SimMessage resp;
      resp.id = next_id_++;
      resp.cls = msg.cls;
      resp.src = msg.dst;
      resp.dst = msg.src;
      resp.payload_bytes = response_payload_bytes(cfg_.payload, topo_.node(msg.dst).kind);
      resp.kind =
          msg.kind == MessageKind::Request ? MessageKind::Response : MessageKind::ControlAck;
      resp.created_at_it = now;
      resp.correlation_id = msg.id;
      out.push_back(std::move(resp));
      break;
    }

    case MessageKind::Response:
    case MessageKind::ControlAck: {
      auto it = msg.correlation_id ? by_request_.find(*msg.correlation_id) : by_request_.end();
      if (it == by_request_.end() || exchanges_[it->second].response) {
        ++unknown_correlations_;
        break;
      }
      auto& ex = exchanges_[it->second];
      ex.response = msg;
      ex.response->delivered_at_it = now;
      break;
    }
  }
  return out;
}

StepResult ItFederate::step(const Grant& grant, std::span<const Delivery> inbox) {
  StepResult result;
  const SimTime start = grant.end - cfg_.tau();
  auto emit = [&](SimMessage m) {
    ++published_[index_of(m.cls)];
    const SimTime at = m.created_at_it;
    result.outbox.push_back({std::move(m), at});
  };
  for (const auto& d : inbox) {
    for (auto& m : on_deliver(d.msg, std::max(d.at, start))) emit(std::move(m));
  }
  for (auto& m : generate_slot_traffic(start, grant.end)) emit(std::move(m));
  result.done = grant.end > duration_;
  return result;
}

std::array<IntervalMetrics, kMessageClassCount> ItFederate::snapshot_reliability(
    IntervalIndex i, SimTime run_end) const {
  const std::array<SimTime, kMessageClassCount> limits{cfg_.delay_limit(MessageClass::Monitoring),
                                                       cfg_.delay_limit(MessageClass::Control)};
  const auto series = reliability_series(exchanges_, limits, cfg_.metrics_interval(), run_end);
  std::array<IntervalMetrics, kMessageClassCount> out;
  for (std::size_t c = 0; c < kMessageClassCount; ++c) {
    out[c].interval = i;
    out[c].cls = static_cast<MessageClass>(c);
  }
  for (const auto& m : series) {
    if (m.interval == i) out[index_of(m.cls)] = m;
  }
  return out;
}

} // namespace gridfed
