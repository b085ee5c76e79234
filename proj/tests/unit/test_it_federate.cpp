#include <gtest/gtest.h>

#include <set>
#include <stdexcept>

#include "gridfed/it_federate.hpp"

namespace gridfed {
namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.counts.hvalv = 6;
  cfg.counts.switches = 4;
  cfg.duration_s = 100;
  return cfg;
}

std::size_t count_kind(const std::vector<SimMessage>& msgs, MessageKind k) {
  std::size_t n = 0;
  for (const auto& m : msgs) n += m.kind == k;
  return n;
}

TEST(PollingSchedule, Defaults) {
  const ScenarioConfig cfg;
  const Topology topo(generate_topology(cfg, cfg.seed));
  const auto s = PollingSchedule::from(cfg, topo);
  EXPECT_EQ(s.poll_period, SimTime::from_seconds(30));
  EXPECT_EQ(s.burst_period, SimTime::from_seconds(600));
  EXPECT_EQ(s.burst_size, 2u);
  EXPECT_EQ(s.der_control_period.ticks(), 0);
  ASSERT_EQ(s.phase.size(), topo.monitored().size());
  for (const auto& p : s.phase) {
    EXPECT_GE(p.ticks(), 0);
    EXPECT_LT(p, s.poll_period);
  }
}

TEST(ItFederate, AggregateRequestRate) {
  ScenarioConfig cfg;
  cfg.counts.pv = 0;
  cfg.counts.wind = 0;
  const Topology topo(generate_topology(cfg, cfg.seed));
  ASSERT_EQ(topo.monitored().size(), 333u);
  ItFederate it(cfg, topo);
  const auto msgs = it.generate_slot_traffic(SimTime{}, SimTime::from_seconds(300));
  const double rate = static_cast<double>(count_kind(msgs, MessageKind::Request)) / 300.0;
  EXPECT_NEAR(rate, 11.1, 1e-9);
}

TEST(ItFederate, PoissonArrivalsKeepTheMeanRate) {
  ScenarioConfig cfg;
  cfg.arrivals = ArrivalProcess::Poisson;
  const Topology topo(generate_topology(cfg, cfg.seed));
  ItFederate it(cfg, topo);
  const auto msgs = it.generate_slot_traffic(SimTime{}, SimTime::from_seconds(3000));
  const double rate = static_cast<double>(count_kind(msgs, MessageKind::Request)) / 3000.0;
  EXPECT_NEAR(rate, 335.0 / 30.0, 0.3);
}

TEST(ItFederate, ControlBurstAt600s) {
  const ScenarioConfig cfg;
  const Topology topo(generate_topology(cfg, cfg.seed));
  ItFederate it(cfg, topo);
  const auto before = it.generate_slot_traffic(SimTime{}, SimTime::from_seconds(600));
  EXPECT_EQ(count_kind(before, MessageKind::ControlCommand), 0u);
  const auto slot =
      it.generate_slot_traffic(SimTime::from_seconds(600), SimTime::from_seconds(600.01));
  std::set<NodeId> targets;
  for (const auto& m : slot) {
    if (m.kind != MessageKind::ControlCommand) continue;
    EXPECT_EQ(m.created_at_it, SimTime::from_seconds(600));
    EXPECT_EQ(m.cls, MessageClass::Control);
    EXPECT_EQ(m.payload_bytes, 184u);
    EXPECT_EQ(topo.node(m.dst).kind, NodeKind::SwitchNode);
    targets.insert(m.dst);
  }
  EXPECT_EQ(count_kind(slot, MessageKind::ControlCommand), 2u);
  EXPECT_EQ(targets.size(), 2u);
}

TEST(ItFederate, NoControlWhenRateIsZero) {
  ScenarioConfig cfg = small_config();
  cfg.lambda_c_hz = 0;
  const Topology topo(generate_topology(cfg, cfg.seed));
  ItFederate it(cfg, topo);
  const auto msgs = it.generate_slot_traffic(SimTime{}, SimTime::from_seconds(2000));
  EXPECT_EQ(count_kind(msgs, MessageKind::ControlCommand), 0u);
}

TEST(ItFederate, DerSetpointsRoundRobin) {
  ScenarioConfig cfg = small_config();
  cfg.der_control_rate_hz = 0.1;
  const Topology topo(generate_topology(cfg, cfg.seed));
  ItFederate it(cfg, topo);
  const auto msgs = it.generate_slot_traffic(SimTime{}, SimTime::from_seconds(45));
  std::vector<NodeId> ders;
  for (const auto& m : msgs) {
    if (m.kind == MessageKind::ControlCommand) ders.push_back(m.dst);
  }
  const auto& d = topo.ders();
  EXPECT_EQ(ders, (std::vector<NodeId>{d[0], d[1], d[0], d[1]}));
}

TEST(ItFederate, EmptySlot) {
  ScenarioConfig cfg = small_config();
  cfg.counts.hvalv = 1;
  cfg.counts.substation = 0;
  cfg.counts.pv = 0;
  cfg.counts.wind = 0;
  const Topology topo(generate_topology(cfg, cfg.seed));
  ItFederate it(cfg, topo);
  const SimTime phase = it.schedule().phase[0];
  const SimTime tau = cfg.tau();
  const TimeslotIndex quiet = slot_of(phase, tau) == 0 ? 1 : 0;
  const auto r = it.step({quiet, slot_end(quiet, tau)}, {});
  EXPECT_TRUE(r.outbox.empty());
  EXPECT_FALSE(r.done);
}

TEST(ItFederate, MidSlotRequestStampedAtDueTick) {
  ScenarioConfig cfg = small_config();
  cfg.tau_s = 1;
  const Topology topo(generate_topology(cfg, cfg.seed));
  ItFederate it(cfg, topo);
  const SimTime due = it.schedule().phase[0];
  const SimTime tau = cfg.tau();
  const auto s = slot_of(due, tau);
  ASSERT_NE(due, slot_start(s, tau)) << "pick a seed whose first poll is mid-slot";
  for (TimeslotIndex i = 0; i < s; ++i) it.step({i, slot_end(i, tau)}, {});
  const auto r = it.step({s, slot_end(s, tau)}, {});
  bool found = false;
  for (const auto& p : r.outbox) {
    if (p.msg.dst != topo.monitored()[0]) continue;
    found = true;
    EXPECT_EQ(p.at, due);
    EXPECT_EQ(p.msg.created_at_it, due);
    EXPECT_EQ(p.msg.kind, MessageKind::Request);
    EXPECT_EQ(p.msg.payload_bytes, 64u);
  }
  EXPECT_TRUE(found);
}

TEST(ItFederate, DoneBeyondDuration) {
  const ScenarioConfig cfg = small_config();
  const Topology topo(generate_topology(cfg, cfg.seed));
  ItFederate it(cfg, topo);
  const SimTime tau = cfg.tau();
  const TimeslotIndex last = slot_of(cfg.duration(), tau);
  EXPECT_TRUE(it.step({last, slot_end(last, tau)}, {}).done);
}

struct Exchange : ::testing::Test {
  ScenarioConfig cfg = small_config();
  Topology topo{generate_topology(cfg, cfg.seed)};
  ItFederate it{cfg, topo};

  SimMessage first_request() {
    for (const auto& m : it.generate_slot_traffic(SimTime{}, SimTime::from_seconds(30))) {
      if (topo.node(m.dst).kind == NodeKind::HvaLv) return m;
    }
    ADD_FAILURE() << "no HVA/LV poll";
    return {};
  }

  const ExchangeRecord& record(MessageId request_id) const {
    for (const auto& ex : it.exchanges()) {
      if (ex.request.id == request_id) return ex;
    }
    throw std::out_of_range("no exchange for request");
  }
};

TEST_F(Exchange, RequestProducesResponse) {
  auto req = first_request();
  req.sent_at_comm = req.created_at_it;
  req.delivered_at_comm = req.created_at_it + SimTime::from_seconds(1);
  const SimTime now = req.created_at_it + SimTime::from_seconds(1.01);
  const auto out = it.on_deliver(req, now);
  ASSERT_EQ(out.size(), 1u);
  const auto& resp = out[0];
  EXPECT_EQ(resp.kind, MessageKind::Response);
  EXPECT_EQ(resp.payload_bytes, 500u);
  EXPECT_EQ(resp.src, req.dst);
  EXPECT_EQ(resp.dst, topo.dms());
  EXPECT_EQ(resp.correlation_id, req.id);
  EXPECT_EQ(resp.created_at_it, now);
  EXPECT_EQ(resp.cls, MessageClass::Monitoring);
  EXPECT_NE(resp.id, req.id);

  const auto& ex = record(req.id);
  EXPECT_EQ(ex.request.delivered_at_it, now);
  EXPECT_EQ(ex.request.delivered_at_comm, req.delivered_at_comm);
}

TEST_F(Exchange, ResponseClosesRecord) {
  const auto req = first_request();
  auto resp = it.on_deliver(req, req.created_at_it + SimTime::from_seconds(1)).at(0);
  it.on_deliver(resp, req.created_at_it + SimTime::from_seconds(2.3));
  const auto& ex = record(req.id);
  ASSERT_TRUE(ex.answered());
  EXPECT_EQ(ex.d_it(), SimTime::from_seconds(2.3));
  EXPECT_EQ(it.unknown_correlations(), 0u);
}

TEST_F(Exchange, DuplicateResponseCounted) {
  const auto req = first_request();
  auto resp = it.on_deliver(req, req.created_at_it).at(0);
  it.on_deliver(resp, req.created_at_it + SimTime::from_seconds(2));
  it.on_deliver(resp, req.created_at_it + SimTime::from_seconds(3));
  EXPECT_EQ(it.unknown_correlations(), 1u);
  EXPECT_EQ(record(req.id).d_it(), SimTime::from_seconds(2));

  SimMessage stray;
  stray.kind = MessageKind::Response;
  stray.correlation_id = 999999;
  it.on_deliver(stray, SimTime{});
  EXPECT_EQ(it.unknown_correlations(), 2u);
}

TEST_F(Exchange, ControlCommandProducesAck) {
  const auto msgs = it.generate_slot_traffic(SimTime{}, SimTime::from_seconds(601));
  const SimMessage* cmd = nullptr;
  for (const auto& m : msgs) {
    if (m.kind == MessageKind::ControlCommand) cmd = &m;
  }
  ASSERT_TRUE(cmd);
  const auto out = it.on_deliver(*cmd, cmd->created_at_it + SimTime::from_seconds(1));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].kind, MessageKind::ControlAck);
  EXPECT_EQ(out[0].payload_bytes, 100u);
  EXPECT_EQ(out[0].cls, MessageClass::Control);
}

TEST_F(Exchange, RateUpdateRephases) {
  it.generate_slot_traffic(SimTime{}, SimTime::from_seconds(50));
  SimMessage ru;
  ru.kind = MessageKind::RateUpdate;
  ru.poll_period = SimTime::from_seconds(800);
  const SimTime now = SimTime::from_seconds(50);
  EXPECT_TRUE(it.on_deliver(ru, now).empty());
  EXPECT_EQ(it.current_poll_period(), SimTime::from_seconds(800));
  EXPECT_EQ(it.rate_updates(), 1u);

  const auto n = static_cast<Tick>(topo.monitored().size());
  const auto msgs =
      it.generate_slot_traffic(now, now + SimTime::from_seconds(1600) + SimTime::from_ticks(1));
  std::vector<SimTime> first_two_cycles;
  for (const auto& m : msgs) {
    if (m.kind == MessageKind::Request) first_two_cycles.push_back(m.created_at_it);
  }
  ASSERT_EQ(first_two_cycles.size(), static_cast<std::size_t>(2 * n));
  const Tick p = SimTime::from_seconds(800).ticks();
  for (Tick k = 0; k < n; ++k) {
    EXPECT_EQ(first_two_cycles[static_cast<std::size_t>(k)].ticks(), now.ticks() + (k + 1) * p / n);
  }
}

TEST_F(Exchange, SnapshotAllOnTime) {
  for (const auto& m : it.generate_slot_traffic(SimTime{}, SimTime::from_seconds(20))) {
    auto resp = it.on_deliver(m, m.created_at_it + SimTime::from_seconds(1));
    for (auto& r : resp) it.on_deliver(r, m.created_at_it + SimTime::from_seconds(2));
  }
  const auto snap = it.snapshot_reliability(0, SimTime::from_seconds(25));
  const auto& mon = snap[index_of(MessageClass::Monitoring)];
  ASSERT_TRUE(mon.mean);
  EXPECT_EQ(*mon.mean, 1.0);
  EXPECT_EQ(mon.ci_half_width, 0.0);
  EXPECT_FALSE(snap[index_of(MessageClass::Control)].mean);
}

TEST(ItFederate, PublishedCountsMatchOutbox) {
  const ScenarioConfig cfg = small_config();
  const Topology topo(generate_topology(cfg, cfg.seed));
  ItFederate it(cfg, topo);
  const SimTime tau = cfg.tau();
  std::size_t n = 0;
  for (TimeslotIndex s = 0; s < 6000; ++s) n += it.step({s, slot_end(s, tau)}, {}).outbox.size();
  EXPECT_EQ(it.published(MessageClass::Monitoring) + it.published(MessageClass::Control), n);
  EXPECT_EQ(n, it.exchanges().size());
}

} // namespace
} // namespace gridfed
