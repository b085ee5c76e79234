#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gridfed/config.hpp"
#include "gridfed/message.hpp"

namespace gridfed {

enum class NodeKind : std::uint8_t {
  Dms,
  Substation,
  HvaLv,
  SwitchNode,
  PvPlant,
  WindFarm,
  LteBaseStation,
  DmrAccessPoint,
};

std::string_view to_string(NodeKind k);

struct Position {
  double x_km = 0.0;
  double y_km = 0.0;
  bool operator==(const Position&) const = default;
};

struct NodeDescriptor {
  NodeId id = 0;
  NodeKind kind = NodeKind::HvaLv;
  Position position;
  bool operator==(const NodeDescriptor&) const = default;
};

constexpr bool is_monitored(NodeKind k) {
  return k == NodeKind::HvaLv || k == NodeKind::Substation || k == NodeKind::PvPlant ||
         k == NodeKind::WindFarm;
}
constexpr bool is_der(NodeKind k) {
  return k == NodeKind::PvPlant || k == NodeKind::WindFarm;
}

/// Payload a node sends back when polled or commanded.
std::uint32_t response_payload_bytes(const PayloadTable& payload, NodeKind k);

/// Places the configured nodes in the square region. Node ids are assigned in
/// the order DMS, DMR access point, LTE base stations, substations, PV plants,
/// wind farms, HVA/LV nodes, switches. The DMR access point sits at the
/// centre, base stations split the region along x, everything else is
/// uniformly random. A pure function of (cfg, seed).
std::vector<NodeDescriptor> generate_topology(const ScenarioConfig& cfg, std::uint64_t seed);

/// Read-only lookups over a generated node list.
class Topology {
 public:
  explicit Topology(std::vector<NodeDescriptor> nodes);

  const std::vector<NodeDescriptor>& nodes() const { return nodes_; }
  const NodeDescriptor& node(NodeId id) const { return nodes_.at(id); }
  NodeId dms() const { return dms_; }
  NodeId dmr_access_point() const { return dmr_ap_; }
  const std::vector<NodeId>& base_stations() const { return base_stations_; }
  /// Monitored endpoints in id order.
  const std::vector<NodeId>& monitored() const { return monitored_; }
  const std::vector<NodeId>& switches() const { return switches_; }
  const std::vector<NodeId>& ders() const { return ders_; }

  /// Index into base_stations() of the closest base station, if any.
  std::optional<std::size_t> nearest_base_station(NodeId id) const;

 private:
  std::vector<NodeDescriptor> nodes_;
  NodeId dms_ = 0;
  NodeId dmr_ap_ = 0;
  std::vector<NodeId> base_stations_;
  std::vector<NodeId> monitored_;
  std::vector<NodeId> switches_;
  std::vector<NodeId> ders_;
  std::vector<std::optional<std::size_t>> nearest_bs_;
};

} // namespace gridfed
