#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gridfed/federate.hpp"
#include "gridfed/message.hpp"
#include "gridfed/time.hpp"

namespace gridfed {

enum class FederateStatus { Joined, Granted, Advancing, Done };

struct SyncReport {
  TimeslotIndex slot = 0;
  std::size_t messages_delivered = 0;
  /// Seconds spent waiting on each federate this slot, indexed by FederateId.
  std::vector<double> per_federate_wallclock;
};

struct FederationResult {
  TimeslotIndex slots_executed = 0;
  std::size_t messages_published = 0;
  std::size_t messages_delivered = 0;
  double wallclock_s = 0.0;
  std::vector<double> federate_wallclock_s;
  bool all_done = false;
};

/// One cross-federate delivery, as observed at a synchronization point.
struct DeliveryRecord {
  TimeslotIndex slot = 0;
  FederateId from = 0;
  FederateId to = 0;
  SimTime published_at;
  SimTime delivered_at;
  MessageId id = 0;
  MessageKind kind = MessageKind::Request;
  MessageClass cls = MessageClass::Monitoring;
  bool operator==(const DeliveryRecord&) const = default;
};

/// Time-stepped run-time infrastructure. Time is cut into half-open slots
/// [s*tau, (s+1)*tau). Each slot every federate is granted the slot end,
/// runs, and returns its publications; at the slot end the queued messages
/// are delivered to every other live federate, ordered by (publish time,
/// message id), and stamped with the slot end. A message therefore waits
/// at most tau before the receiver sees it.
class Rti {
 public:
  explicit Rti(SimTime tau);
  ~Rti();

  Rti(const Rti&) = delete;
  Rti& operator=(const Rti&) = delete;

  /// Throws FederationStarted or DuplicateName.
  FederateId register_federate(std::string name, std::unique_ptr<FederateEndpoint> endpoint);

  void start();
  bool started() const { return started_; }

  /// Queues `msg` for delivery at the end of the current slot. Throws
  /// ProtocolViolation if `at` is outside [slot*tau, (slot+1)*tau).
  void publish(FederateId from, SimMessage msg, SimTime at);

  /// Runs one full grant / collect / deliver cycle.
  SyncReport advance_slot();

  /// Advances until `duration` is covered or every federate is done.
  FederationResult run(SimTime duration);

  /// Sends the end-of-federation notice to every endpoint. Idempotent.
  void finish();

  /// Totals accumulated so far; still valid after an exception.
  const FederationResult& result() const { return result_; }

  void set_delivery_observer(std::function<void(const DeliveryRecord&)> observer) {
    delivery_observer_ = std::move(observer);
  }
  void set_slot_observer(std::function<void(const SyncReport&)> observer) {
    slot_observer_ = std::move(observer);
  }

  SimTime tau() const { return tau_; }
  TimeslotIndex current_slot() const { return current_slot_; }
  std::size_t federate_count() const { return federates_.size(); }
  const std::string& name(FederateId id) const { return federates_.at(id).name; }
  FederateStatus status(FederateId id) const { return federates_.at(id).status; }

  /// Messages queued for `id` but not yet handed over in a grant.
  std::span<const Delivery> pending_inbox(FederateId id) const { return federates_.at(id).inbox; }
  /// Messages published this slot and awaiting the synchronization point.
  std::size_t pending_outbox_size() const;

 private:
  struct Pending {
    SimMessage msg;
    SimTime at;
    FederateId from;
  };
  struct Member {
    std::string name;
    std::unique_ptr<FederateEndpoint> endpoint;
    FederateStatus status = FederateStatus::Joined;
    std::vector<Pending> outbox; // queued for delivery to this federate
    std::vector<Delivery> inbox; // delivered, handed over with the next grant
  };

  SimTime tau_;
  std::vector<Member> federates_;
  bool started_ = false;
  bool finished_ = false;
  TimeslotIndex current_slot_ = 0;
  FederationResult result_;
  std::function<void(const DeliveryRecord&)> delivery_observer_;
  std::function<void(const SyncReport&)> slot_observer_;
};

} // namespace gridfed
