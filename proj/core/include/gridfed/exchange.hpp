#pragma once

#include <optional>

#include "gridfed/message.hpp"

namespace gridfed {

/// One request/response pair as seen by the DMS. `request` is updated with
/// its network and delivery timestamps once it reaches the node.
struct ExchangeRecord {
  SimMessage request;
  std::optional<SimMessage> response;
  NodeId node = 0;
  MessageClass cls = MessageClass::Monitoring;

  bool answered() const { return response && response->delivered_at_it.has_value(); }

  /// Round trip measured by the DMS, when answered.
  std::optional<SimTime> d_it() const {
    if (!answered()) return std::nullopt;
    return *response->delivered_at_it - request.created_at_it;
  }

  /// Sum of the network delays of both legs, when answered.
  std::optional<SimTime> d_comm() const {
    if (!answered()) return std::nullopt;
    const auto req = request.comm_delay();
    const auto resp = response->comm_delay();
    if (!req || !resp) return std::nullopt;
    return *req + *resp;
  }
};

} // namespace gridfed
