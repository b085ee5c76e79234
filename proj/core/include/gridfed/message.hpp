#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "gridfed/time.hpp"

namespace gridfed {

using NodeId = std::uint32_t;
using MessageId = std::uint64_t;

enum class MessageClass : std::uint8_t { Monitoring = 0, Control = 1 };
inline constexpr std::size_t kMessageClassCount = 2;

constexpr std::size_t index_of(MessageClass c) {
  return static_cast<std::size_t>(c);
}

enum class MessageKind : std::uint8_t {
  Request,
  Response,
  ControlCommand,
  ControlAck,
  /// Application-layer notice from the network federate telling the DMS to
  /// change its polling period.
  RateUpdate,
};

std::string_view to_string(MessageClass c);
std::string_view to_string(MessageKind k);
std::optional<MessageClass> message_class_from_string(std::string_view s);
std::optional<MessageKind> message_kind_from_string(std::string_view s);

struct SimMessage {
  MessageId id = 0;
  MessageClass cls = MessageClass::Monitoring;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t payload_bytes = 1;
  MessageKind kind = MessageKind::Request;
  SimTime created_at_it;
  std::optional<SimTime> delivered_at_it;
  std::optional<SimTime> sent_at_comm;
  std::optional<SimTime> delivered_at_comm;
  std::optional<MessageId> correlation_id;
  /// New polling period carried by a RateUpdate.
  std::optional<SimTime> poll_period;

  bool operator==(const SimMessage&) const = default;

  /// Delay seen by the IT perspective, when delivered.
  std::optional<SimTime> it_delay() const {
    if (!delivered_at_it) return std::nullopt;
    return *delivered_at_it - created_at_it;
  }

  /// Delay seen by the communication perspective, when delivered.
  std::optional<SimTime> comm_delay() const {
    if (!sent_at_comm || !delivered_at_comm) return std::nullopt;
    return *delivered_at_comm - *sent_at_comm;
  }

  /// True for messages that traverse a network link.
  bool is_network_traffic() const { return kind != MessageKind::RateUpdate; }
};

} // namespace gridfed
