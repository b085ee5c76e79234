#include "gridfed/topology.hpp"

#include <stdexcept>

#include "gridfed/random.hpp"

namespace gridfed {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Dms:
      return "dms";
    case NodeKind::Substation:
      return "substation";
    case NodeKind::HvaLv:
      return "hva_lv";
    case NodeKind::SwitchNode:
      return "switch";
    case NodeKind::PvPlant:
      return "pv_plant";
    case NodeKind::WindFarm:
      return "wind_farm";
    case NodeKind::LteBaseStation:
      return "lte_bs";
    case NodeKind::DmrAccessPoint:
      return "dmr_ap";
  }
  return "?";
}

std::uint32_t response_payload_bytes(const PayloadTable& payload, NodeKind k) {
  switch (k) {
    case NodeKind::HvaLv:
      return payload.hvalv;
    case NodeKind::Substation:
      return payload.substation;
    case NodeKind::PvPlant:
    case NodeKind::WindFarm:
      return payload.der;
    case NodeKind::SwitchNode:
      return payload.switch_ack;
    default:
      throw std::invalid_argument("node kind has no response payload");
  }
}

namespace {
constexpr std::uint64_t kTopologyStream = 0x70;
}

std::vector<NodeDescriptor> generate_topology(const ScenarioConfig& cfg, std::uint64_t seed) {
  const double side = cfg.region_side_km;
  Rng rng(seed, kTopologyStream);
  std::vector<NodeDescriptor> out;

  auto add = [&](NodeKind kind, Position p) {
    out.push_back({static_cast<NodeId>(out.size()), kind, p});
  };
  auto add_random = [&](NodeKind kind, std::uint32_t count) {
    for (std::uint32_t i = 0; i < count; ++i) {
      const double x = rng.uniform(0.0, side);
      const double y = rng.uniform(0.0, side);
      add(kind, {x, y});
    }
  };

  add_random(NodeKind::Dms, cfg.counts.dms);
  for (std::uint32_t i = 0; i < cfg.counts.dmr_ap; ++i)
    add(NodeKind::DmrAccessPoint, {side / 2, side / 2});
  for (std::uint32_t i = 0; i < cfg.lte_bs_count; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * side / static_cast<double>(cfg.lte_bs_count);
    add(NodeKind::LteBaseStation, {x, side / 2});
  }
  add_random(NodeKind::Substation, cfg.counts.substation);
  add_random(NodeKind::PvPlant, cfg.counts.pv);
  add_random(NodeKind::WindFarm, cfg.counts.wind);
  add_random(NodeKind::HvaLv, cfg.counts.hvalv);
  add_random(NodeKind::SwitchNode, cfg.counts.switches);
  return out;
}

Topology::Topology(std::vector<NodeDescriptor> nodes) : nodes_(std::move(nodes)) {
  bool have_dms = false;
  bool have_dmr = false;
  for (const auto& n : nodes_) {
    switch (n.kind) {
      case NodeKind::Dms:
        dms_ = n.id;
        have_dms = true;
        break;
      case NodeKind::DmrAccessPoint:
        dmr_ap_ = n.id;
        have_dmr = true;
        break;
      case NodeKind::LteBaseStation:
        base_stations_.push_back(n.id);
        break;
      case NodeKind::SwitchNode:
        switches_.push_back(n.id);
        break;
      default:
        break;
    }
    if (is_monitored(n.kind)) monitored_.push_back(n.id);
    if (is_der(n.kind)) ders_.push_back(n.id);
  }
  if (!have_dms || !have_dmr) {
    throw std::invalid_argument("topology requires one DMS and one DMR access point");
  }

  nearest_bs_.resize(nodes_.size());
  for (const auto& n : nodes_) {
    double best = 0.0;
    for (std::size_t b = 0; b < base_stations_.size(); ++b) {
      const auto& p = nodes_[base_stations_[b]].position;
      const double dx = p.x_km - n.position.x_km;
      const double dy = p.y_km - n.position.y_km;
      const double d2 = dx * dx + dy * dy;
      if (!nearest_bs_[n.id] || d2 < best) {
        nearest_bs_[n.id] = b;
        best = d2;
      }
    }
  }
}

std::optional<std::size_t> Topology::nearest_base_station(NodeId id) const {
  return nearest_bs_.at(id);
}

} // namespace gridfed
