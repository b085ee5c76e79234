#include "gridfed/rti.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "gridfed/errors.hpp"

namespace gridfed {

namespace {
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}
} // namespace

Rti::Rti(SimTime tau) : tau_(tau) {
  if (tau.ticks() <= 0) throw std::invalid_argument("tau must be positive");
}

Rti::~Rti() = default;

FederateId Rti::register_federate(std::string name, std::unique_ptr<FederateEndpoint> endpoint) {
  if (started_) throw FederationStarted();
  for (const auto& m : federates_) {
    if (m.name == name) throw DuplicateName(name);
  }
  if (!endpoint) throw std::invalid_argument("federate endpoint is null");
  Member m;
  m.name = std::move(name);
  m.endpoint = std::move(endpoint);
  federates_.push_back(std::move(m));
  result_.federate_wallclock_s.push_back(0.0);
  return static_cast<FederateId>(federates_.size() - 1);
}

void Rti::start() {
  if (started_) throw FederationStarted();
  started_ = true;
}

std::size_t Rti::pending_outbox_size() const {
  std::size_t n = 0;
  for (const auto& m : federates_) n += m.outbox.size();
  return n;
}

void Rti::publish(FederateId from, SimMessage msg, SimTime at) {
  if (from >= federates_.size()) throw ProtocolViolation("unknown federate id");
  const SimTime lo = slot_start(current_slot_, tau_);
  const SimTime hi = slot_end(current_slot_, tau_);
  if (at < lo || at >= hi) {
    throw ProtocolViolation("message " + std::to_string(msg.id) + " from '" +
                            federates_[from].name + "' stamped at tick " +
                            std::to_string(at.ticks()) + " outside granted slot " +
                            std::to_string(current_slot_));
  }
  ++result_.messages_published;
  for (FederateId to = 0; to < federates_.size(); ++to) {
    if (to == from || federates_[to].status == FederateStatus::Done) continue;
    federates_[to].outbox.push_back(Pending{msg, at, from});
  }
}

SyncReport Rti::advance_slot() {
  if (!started_) start();
  if (finished_) throw ProtocolViolation("federation already finished");

  const Grant grant{current_slot_, slot_end(current_slot_, tau_)};
  SyncReport report;
  report.slot = current_slot_;
  report.per_federate_wallclock.assign(federates_.size(), 0.0);

  for (auto& m : federates_) {
    if (m.status == FederateStatus::Done) continue;
    m.status = FederateStatus::Granted;
    m.endpoint->begin_slot(grant, std::move(m.inbox));
    m.inbox.clear();
  }

  for (FederateId id = 0; id < federates_.size(); ++id) {
    auto& m = federates_[id];
    if (m.status != FederateStatus::Granted) continue;
    m.status = FederateStatus::Advancing;
    const auto t0 = Clock::now();
    StepResult step = m.endpoint->end_slot();
    const double dt = seconds_since(t0);
    report.per_federate_wallclock[id] = dt;
    result_.federate_wallclock_s[id] += dt;
    for (auto& p : step.outbox) publish(id, std::move(p.msg), p.at);
    m.status = step.done ? FederateStatus::Done : FederateStatus::Joined;
  }

  // Synchronization point: everything queued this slot becomes visible.
  for (FederateId to = 0; to < federates_.size(); ++to) {
    auto& m = federates_[to];
    std::stable_sort(m.outbox.begin(), m.outbox.end(), [](const Pending& a, const Pending& b) {
      if (a.at != b.at) return a.at < b.at;
      if (a.msg.id != b.msg.id) return a.msg.id < b.msg.id;
      return a.from < b.from;
    });
    if (m.status != FederateStatus::Done) {
      for (auto& p : m.outbox) {
        if (delivery_observer_) {
          delivery_observer_(DeliveryRecord{current_slot_, p.from, to, p.at, grant.end, p.msg.id,
                                            p.msg.kind, p.msg.cls});
        }
        m.inbox.push_back(Delivery{std::move(p.msg), grant.end});
        ++report.messages_delivered;
      }
    }
    m.outbox.clear();
  }

  result_.messages_delivered += report.messages_delivered;
  ++result_.slots_executed;
  ++current_slot_;
  result_.all_done = std::all_of(federates_.begin(), federates_.end(),
                                 [](const Member& m) { return m.status == FederateStatus::Done; });
  if (slot_observer_) slot_observer_(report);
  return report;
}

FederationResult Rti::run(SimTime duration) {
  if (federates_.size() < 2) throw ProtocolViolation("a federation needs at least two federates");
  const auto t0 = Clock::now();
  const TimeslotIndex slots = (duration.ticks() + tau_.ticks() - 1) / tau_.ticks();
  try {
    while (current_slot_ < slots && !result_.all_done) {
      advance_slot();
    }
  } catch (...) {
    result_.wallclock_s += seconds_since(t0);
    throw;
  }
  result_.wallclock_s += seconds_since(t0);
  return result_;
}

void Rti::finish() {
  if (finished_) return;
  finished_ = true;
  for (auto& m : federates_) m.endpoint->finish();
}

} // namespace gridfed
