#include <gtest/gtest.h>

#include <map>

#include "gridfed/errors.hpp"
#include "gridfed/net_federate.hpp"

namespace gridfed {
namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.counts.hvalv = 6;
  cfg.counts.switches = 2;
  cfg.duration_s = 100;
  return cfg;
}

/// Runs `net` slot by slot up to `until`, delivering `inject` messages at
/// the start of the slot containing their time. Returns every publication.
std::vector<Publication> drive(NetFederate& net, const ScenarioConfig& cfg, SimTime from,
                               SimTime until, std::vector<Delivery> inject = {}) {
  const SimTime tau = cfg.tau();
  std::vector<Publication> out;
  for (TimeslotIndex s = slot_of(from, tau); slot_start(s, tau) < until; ++s) {
    std::vector<Delivery> inbox;
    for (const auto& d : inject) {
      if (slot_of(d.at, tau) == s) inbox.push_back(d);
    }
    auto r = net.step({s, slot_end(s, tau)}, inbox);
    for (auto& p : r.outbox) {
      EXPECT_GE(p.at, slot_start(s, tau));
      EXPECT_LT(p.at, slot_end(s, tau));
      out.push_back(std::move(p));
    }
  }
  return out;
}

SimMessage message(MessageId id, MessageClass cls, NodeId src, NodeId dst, std::uint32_t bytes,
                   MessageKind kind) {
  SimMessage m;
  m.id = id;
  m.cls = cls;
  m.src = src;
  m.dst = dst;
  m.payload_bytes = bytes;
  m.kind = kind;
  return m;
}

struct Fixture : ::testing::Test {
  ScenarioConfig cfg = small_config();
  Topology topo{generate_topology(cfg, cfg.seed)};

  NodeId first_hvalv() const {
    for (const auto& n : topo.nodes()) {
      if (n.kind == NodeKind::HvaLv) return n.id;
    }
    return 0;
  }
  NodeId pv() const { return topo.ders().front(); }
};

TEST(RateAdaptation, UsableBudget) {
  ScenarioConfig cfg;
  EXPECT_DOUBLE_EQ(rate_adaptation_rate(cfg, 1, 1344.0), 1.0);
  EXPECT_DOUBLE_EQ((1 - cfg.alpha_e) * cfg.dmr_capacity_bps, 1344.0);
}

TEST(RateAdaptation, CaseStudyRate) {
  ScenarioConfig cfg;
  const double rate = rate_adaptation_rate(cfg, 335, 5824.0);
  EXPECT_NEAR(rate, 1344.0 / (335.0 * 5824.0), 1e-15);
  EXPECT_NEAR(rate, 6.9e-4, 0.05e-4);
  EXPECT_NEAR(1.0 / rate / 60.0, 24.2, 0.1);
}

TEST(RateAdaptation, ZeroAlphaUsesFullCapacity) {
  ScenarioConfig cfg;
  cfg.alpha_e = 0;
  EXPECT_DOUBLE_EQ(rate_adaptation_rate(cfg, 10, 1920.0), 0.1);
}

TEST(RateAdaptation, ZeroExchangeBitsRejected) {
  ScenarioConfig cfg;
  try {
    rate_adaptation_rate(cfg, 335, 0.0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.key(), "exchange_bits");
  }
}

TEST(RateAdaptation, LiteralForm) {
  ScenarioConfig cfg;
  cfg.ra_literal_formula = true;
  // (1/n) * (n * bits * lambda_m) / 1344
  const double expected = 5792.0 / 30.0 / 1344.0;
  EXPECT_NEAR(rate_adaptation_rate(cfg, 335, 5792.0), expected, 1e-12);
}

TEST(RateAdaptation, ExchangeBits) {
  ScenarioConfig cfg;
  EXPECT_EQ(monitoring_exchange_bits(cfg, NodeKind::HvaLv), 5792u);
  EXPECT_EQ(monitoring_exchange_bits(cfg, NodeKind::Substation), (64u + 80 + 5000 + 320) * 8);
}

TEST_F(Fixture, ControlRidesDmrWhileLteUp) {
  NetFederate net(cfg, topo);
  const auto sw = topo.switches().front();
  EXPECT_EQ(net.route(message(1, MessageClass::Control, topo.dms(), sw, 184,
                              MessageKind::ControlCommand)),
            NetFederate::kDmrLink);
}

TEST_F(Fixture, MonitoringUsesNearestBaseStation) {
  NetFederate net(cfg, topo);
  for (const auto id : topo.monitored()) {
    const auto bs = *topo.nearest_base_station(id);
    const auto req = message(1, MessageClass::Monitoring, topo.dms(), id, 64, MessageKind::Request);
    const auto resp =
        message(2, MessageClass::Monitoring, id, topo.dms(), 500, MessageKind::Response);
    EXPECT_EQ(net.route(req), static_cast<LinkId>(bs + 1));
    EXPECT_EQ(net.route(resp), static_cast<LinkId>(bs + 1));
  }
}

TEST_F(Fixture, DerControlFollowsConfiguredPath) {
  const auto cmd =
      message(1, MessageClass::Control, topo.dms(), pv(), 184, MessageKind::ControlCommand);
  {
    NetFederate net(cfg, topo);
    EXPECT_NE(net.route(cmd), NetFederate::kDmrLink);
  }
  cfg.der_control_via = DerControlVia::Dmr;
  NetFederate net(cfg, topo);
  EXPECT_EQ(net.route(cmd), NetFederate::kDmrLink);
}

TEST_F(Fixture, MonitoringFallsBackToDmrAfterFailure) {
  cfg.lte_fail_at_s = 50;
  NetFederate net(cfg, topo);
  drive(net, cfg, SimTime{}, SimTime::from_seconds(51));
  const auto req =
      message(1, MessageClass::Monitoring, topo.dms(), first_hvalv(), 64, MessageKind::Request);
  EXPECT_EQ(net.route(req), NetFederate::kDmrLink);
  for (LinkId id = 1; id < net.links().size(); ++id) EXPECT_FALSE(net.link(id).up());
}

TEST_F(Fixture, NoRouteWhenEverythingIsDown) {
  NetFederate net(cfg, topo);
  for (LinkId id = 0; id < net.links().size(); ++id) net.set_link_state(id, false, SimTime{});
  const auto req =
      message(1, MessageClass::Monitoring, topo.dms(), first_hvalv(), 64, MessageKind::Request);
  EXPECT_FALSE(net.route(req));
  drive(net, cfg, SimTime{}, SimTime::from_seconds(1), {{req, SimTime{}}});
  EXPECT_EQ(net.counters(MessageClass::Monitoring).dropped_no_route, 1u);
}

TEST_F(Fixture, LteResponseTiming) {
  NetFederate net(cfg, topo);
  const auto resp =
      message(5, MessageClass::Monitoring, first_hvalv(), topo.dms(), 500, MessageKind::Response);
  const auto out = drive(net, cfg, SimTime{}, SimTime::from_seconds(1), {{resp, SimTime{}}});
  ASSERT_EQ(out.size(), 1u);
  // 540 B at 50 kbps plus 20 ms access latency.
  EXPECT_EQ(out[0].at, SimTime::from_seconds(0.1064));
  EXPECT_EQ(out[0].msg.sent_at_comm, SimTime{});
  EXPECT_EQ(out[0].msg.delivered_at_comm, SimTime::from_seconds(0.1064));
  EXPECT_EQ(out[0].msg.comm_delay(), SimTime::from_seconds(0.1064));
  EXPECT_EQ(out[0].msg.id, 5u);
  // The Ack still occupies the link afterwards.
  EXPECT_EQ(net.link(*net.route(resp)).stats().frames_served, 2u);
}

TEST_F(Fixture, DmrControlTiming) {
  NetFederate net(cfg, topo);
  const auto sw = topo.switches().front();
  const auto cmd =
      message(3, MessageClass::Control, topo.dms(), sw, 184, MessageKind::ControlCommand);
  const auto out =
      drive(net, cfg, SimTime{}, SimTime::from_seconds(5), {{cmd, SimTime::from_seconds(2)}});
  ASSERT_EQ(out.size(), 1u);
  // (184 + 40) B at 1920 bps is 0.9333.. s, rounded up to whole ticks.
  const SimTime tx = transmission_time(224, 1920.0);
  EXPECT_EQ(tx.ticks(), 93334);
  EXPECT_EQ(out[0].msg.comm_delay(), tx + SimTime::from_seconds(0.05));
}

TEST_F(Fixture, FailureBeyondDurationHasNoEffect) {
  cfg.lte_fail_at_s = 500; // duration is 100 s
  NetFederate net(cfg, topo);
  drive(net, cfg, SimTime{}, SimTime::from_seconds(100) + cfg.tau());
  for (const auto& l : net.links()) EXPECT_TRUE(l.up());
  net.inject_failure({FailureKind::LteAllDown, SimTime::from_seconds(200)});
  drive(net, cfg, SimTime::from_seconds(100) + cfg.tau(), SimTime::from_seconds(300));
  for (const auto& l : net.links()) EXPECT_TRUE(l.up());
}

TEST_F(Fixture, FailureLosesInFlightMessages) {
  cfg.lte_fail_at_s = 1;
  NetFederate net(cfg, topo);
  std::vector<Delivery> in;
  // 40 large responses keep the LTE cell busy well past the failure.
  for (MessageId i = 0; i < 40; ++i) {
    in.push_back({message(100 + i, MessageClass::Monitoring, first_hvalv(), topo.dms(), 5000,
                          MessageKind::Response),
                  SimTime::from_seconds(0.5)});
  }
  const auto out = drive(net, cfg, SimTime{}, SimTime::from_seconds(10), in);
  const auto& c = net.counters(MessageClass::Monitoring);
  EXPECT_EQ(c.received, 40u);
  EXPECT_GT(c.lost_to_failure, 30u);
  EXPECT_EQ(c.delivered, out.size());
  EXPECT_EQ(c.received, c.delivered + c.lost_to_failure + c.dropped_no_route + c.dropped_overflow +
                            net.in_flight(MessageClass::Monitoring));
  for (const auto& l : net.links()) {
    const auto& s = l.stats();
    EXPECT_EQ(s.frames_in, s.frames_served + s.frames_lost + l.frames_in_flight());
  }
}

TEST_F(Fixture, ConservationUnderLoad) {
  cfg.lte_fail_at_s = 20;
  NetFederate net(cfg, topo);
  std::vector<Delivery> in;
  MessageId id = 1;
  for (int t = 0; t < 60; ++t) {
    for (const auto n : topo.monitored()) {
      in.push_back(
          {message(id++, MessageClass::Monitoring, n, topo.dms(), 500, MessageKind::Response),
           SimTime::from_seconds(t)});
    }
    for (const auto sw : topo.switches()) {
      in.push_back(
          {message(id++, MessageClass::Control, topo.dms(), sw, 184, MessageKind::ControlCommand),
           SimTime::from_seconds(t + 0.5)});
    }
  }
  const auto out = drive(net, cfg, SimTime{}, SimTime::from_seconds(70), in);
  std::uint64_t delivered = 0;
  for (auto cls : {MessageClass::Monitoring, MessageClass::Control}) {
    const auto& c = net.counters(cls);
    EXPECT_EQ(c.received, c.delivered + c.lost_to_failure + c.dropped_no_route +
                              c.dropped_overflow + net.in_flight(cls));
    delivered += c.delivered;
  }
  EXPECT_EQ(delivered, out.size());
  EXPECT_GT(net.in_flight(MessageClass::Monitoring), 0u) << "DMR should be overloaded";
}

TEST_F(Fixture, WfqRaPublishesRateUpdates) {
  cfg.qos = QosMode::WfqRa;
  cfg.lte_fail_at_s = 10;
  cfg.lte_restore_at_s = 40;
  NetFederate net(cfg, topo);
  ASSERT_GT(net.adapted_rate_hz(), 0.0);
  const auto out = drive(net, cfg, SimTime{}, SimTime::from_seconds(50));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].msg.kind, MessageKind::RateUpdate);
  EXPECT_EQ(out[0].at, SimTime::from_seconds(10));
  EXPECT_EQ(out[0].msg.dst, topo.dms());
  EXPECT_EQ(out[0].msg.poll_period, net.adapted_period());
  EXPECT_GE(out[0].msg.id, kNetMessageIdBase);
  // Rounded up: the period is never shorter than 1 / rate.
  EXPECT_GE(net.adapted_period().seconds(), 1.0 / net.adapted_rate_hz());
  EXPECT_LT(net.adapted_period().seconds() - 1.0 / net.adapted_rate_hz(), 1e-5);

  EXPECT_EQ(out[1].at, SimTime::from_seconds(40));
  EXPECT_EQ(out[1].msg.poll_period, SimTime::from_seconds(30));
  EXPECT_NE(out[0].msg.id, out[1].msg.id);
  EXPECT_FALSE(net.rate_adaptation_active());
}

TEST_F(Fixture, PlainWfqSendsNoRateUpdate) {
  cfg.qos = QosMode::Wfq;
  cfg.lte_fail_at_s = 10;
  NetFederate net(cfg, topo);
  EXPECT_TRUE(drive(net, cfg, SimTime{}, SimTime::from_seconds(20)).empty());
}

TEST_F(Fixture, DoneAfterDuration) {
  NetFederate net(cfg, topo);
  const SimTime tau = cfg.tau();
  const TimeslotIndex last = slot_of(cfg.duration(), tau) - 1;
  EXPECT_FALSE(net.step({last, slot_end(last, tau)}, {}).done);
  EXPECT_TRUE(net.step({last + 1, slot_end(last + 1, tau)}, {}).done);
}

TEST_F(Fixture, EmptySlotProducesNothing) {
  NetFederate net(cfg, topo);
  const auto r = net.step({0, cfg.tau()}, {});
  EXPECT_TRUE(r.outbox.empty());
  EXPECT_FALSE(r.done);
}

TEST_F(Fixture, RateUpdateIsNotNetworkTraffic) {
  NetFederate net(cfg, topo);
  auto m = message(1, MessageClass::Monitoring, topo.dms(), topo.dms(), 1, MessageKind::RateUpdate);
  net.step({0, cfg.tau()}, std::vector<Delivery>{{m, SimTime{}}});
  EXPECT_EQ(net.unexpected_messages(), 1u);
  EXPECT_EQ(net.counters(MessageClass::Monitoring).received, 0u);
}

TEST_F(Fixture, SamplesAtIntervalBoundaries) {
  NetFederate net(cfg, topo);
  drive(net, cfg, SimTime{}, SimTime::from_seconds(60));
  const auto& s = net.samples();
  ASSERT_EQ(s.size(), 2 * net.links().size());
  EXPECT_EQ(s.front().t, SimTime::from_seconds(25));
  EXPECT_EQ(s.back().t, SimTime::from_seconds(50));
}

TEST_F(Fixture, DeterministicAcrossInstances) {
  cfg.lte_fail_at_s = 5;
  std::vector<Delivery> in;
  for (MessageId i = 0; i < 30; ++i) {
    in.push_back({message(i + 1, i % 3 ? MessageClass::Monitoring : MessageClass::Control,
                          topo.monitored()[i % topo.monitored().size()], topo.dms(), 500,
                          MessageKind::Response),
                  SimTime::from_ticks(static_cast<Tick>(i) * 12345)});
  }
  NetFederate a(cfg, topo);
  NetFederate b(cfg, topo);
  const auto oa = drive(a, cfg, SimTime{}, SimTime::from_seconds(30), in);
  const auto ob = drive(b, cfg, SimTime{}, SimTime::from_seconds(30), in);
  EXPECT_EQ(oa, ob);
}

} // namespace
} // namespace gridfed
