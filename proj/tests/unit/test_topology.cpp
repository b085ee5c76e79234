#include <gtest/gtest.h>

#include <map>

#include "gridfed/topology.hpp"

namespace gridfed {
namespace {

TEST(Topology, DefaultCaseStudy) {
  const ScenarioConfig cfg;
  const auto nodes = generate_topology(cfg, 1);
  ASSERT_EQ(nodes.size(), 365u);

  std::map<NodeKind, int> counts;
  for (const auto& n : nodes) ++counts[n.kind];
  EXPECT_EQ(counts[NodeKind::HvaLv], 332);
  EXPECT_EQ(counts[NodeKind::SwitchNode], 26);
  EXPECT_EQ(counts[NodeKind::Substation], 1);
  EXPECT_EQ(counts[NodeKind::PvPlant], 1);
  EXPECT_EQ(counts[NodeKind::WindFarm], 1);
  EXPECT_EQ(counts[NodeKind::Dms], 1);
  EXPECT_EQ(counts[NodeKind::LteBaseStation], 2);
  EXPECT_EQ(counts[NodeKind::DmrAccessPoint], 1);

  const Topology topo(nodes);
  EXPECT_EQ(topo.node(topo.dmr_access_point()).position, (Position{7.5, 7.5}));
  ASSERT_EQ(topo.base_stations().size(), 2u);
  const auto& bs0 = topo.node(topo.base_stations()[0]).position;
  const auto& bs1 = topo.node(topo.base_stations()[1]).position;
  EXPECT_LT(bs0.x_km, 7.5);
  EXPECT_GT(bs1.x_km, 7.5);
  EXPECT_EQ(topo.monitored().size(), 335u);
  EXPECT_EQ(topo.switches().size(), 26u);
  EXPECT_EQ(topo.ders().size(), 2u);

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    EXPECT_EQ(nodes[i].id, i);
    EXPECT_GE(nodes[i].position.x_km, 0.0);
    EXPECT_LE(nodes[i].position.x_km, 15.0);
    EXPECT_GE(nodes[i].position.y_km, 0.0);
    EXPECT_LE(nodes[i].position.y_km, 15.0);
  }
}

TEST(Topology, MinimalFederation) {
  ScenarioConfig cfg;
  cfg.counts = {0, 0, 0, 0, 0, 1, 1};
  cfg.lte_bs_count = 0;
  const auto nodes = generate_topology(cfg, 1);
  ASSERT_EQ(nodes.size(), 2u);
  const Topology topo(nodes);
  EXPECT_TRUE(topo.monitored().empty());
  EXPECT_FALSE(topo.nearest_base_station(topo.dms()).has_value());
}

TEST(Topology, PureFunctionOfSeed) {
  const ScenarioConfig cfg;
  EXPECT_EQ(generate_topology(cfg, 7), generate_topology(cfg, 7));
  EXPECT_NE(generate_topology(cfg, 7), generate_topology(cfg, 8));
}

TEST(Topology, NearestBaseStation) {
  const ScenarioConfig cfg;
  const Topology topo(generate_topology(cfg, 3));
  for (const auto id : topo.monitored()) {
    const auto& p = topo.node(id).position;
    const auto nearest = topo.nearest_base_station(id);
    ASSERT_TRUE(nearest);
    EXPECT_EQ(*nearest, p.x_km < 7.5 ? 0u : 1u) << "node " << id;
  }
}

TEST(Topology, ResponsePayloads) {
  const PayloadTable p;
  EXPECT_EQ(response_payload_bytes(p, NodeKind::HvaLv), 500u);
  EXPECT_EQ(response_payload_bytes(p, NodeKind::Substation), 5000u);
  EXPECT_EQ(response_payload_bytes(p, NodeKind::PvPlant), 224u);
  EXPECT_EQ(response_payload_bytes(p, NodeKind::WindFarm), 224u);
  EXPECT_EQ(response_payload_bytes(p, NodeKind::SwitchNode), 100u);
  EXPECT_THROW(response_payload_bytes(p, NodeKind::Dms), std::invalid_argument);
}

} // namespace
} // namespace gridfed
