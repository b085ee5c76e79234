#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridfed/message.hpp"
#include "gridfed/time.hpp"

namespace gridfed {

using FederateId = std::uint32_t;

/// Permission to simulate up to (but excluding) `end`.
struct Grant {
  TimeslotIndex slot = 0;
  SimTime end;
  bool operator==(const Grant&) const = default;
};

/// A message handed to a federate at a synchronization point.
struct Delivery {
  SimMessage msg;
  SimTime at;
  bool operator==(const Delivery&) const = default;
};

/// A message emitted by a federate during its granted slot.
struct Publication {
  SimMessage msg;
  SimTime at;
  bool operator==(const Publication&) const = default;
};

struct StepResult {
  std::vector<Publication> outbox;
  bool done = false;
};

/// A simulator taking part in the federation. `step` runs the local model
/// from the end of the previous grant up to `grant.end`, having first
/// received `inbox` (the messages delivered at the previous synchronization
/// point, in delivery order). Every publication must be stamped inside the
/// granted slot.
class Federate {
 public:
  virtual ~Federate() = default;
  virtual StepResult step(const Grant& grant, std::span<const Delivery> inbox) = 0;
};

/// RTI-side handle to one federate. `begin_slot` hands over the grant and
/// inbox; `end_slot` blocks until the federate acknowledges the slot. The
/// split lets remote federates run concurrently between the two calls.
class FederateEndpoint {
 public:
  virtual ~FederateEndpoint() = default;
  virtual void begin_slot(const Grant& grant, std::vector<Delivery> inbox) = 0;
  virtual StepResult end_slot() = 0;
  /// Called once when the federation ends.
  virtual void finish() {}
};

/// Function-call transport: the federate lives in the RTI's address space.
class InProcessEndpoint final : public FederateEndpoint {
 public:
  explicit InProcessEndpoint(Federate& federate) : federate_(federate) {}

  void begin_slot(const Grant& grant, std::vector<Delivery> inbox) override {
    grant_ = grant;
    inbox_ = std::move(inbox);
  }

  StepResult end_slot() override {
    auto result = federate_.step(grant_, inbox_);
    inbox_.clear();
    return result;
  }

 private:
  Federate& federate_;
  Grant grant_;
  std::vector<Delivery> inbox_;
};

} // namespace gridfed
