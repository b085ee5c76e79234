#include <gtest/gtest.h>

#include "gridfed/errors.hpp"
#include "gridfed/output.hpp"
#include "gridfed/scenario.hpp"

namespace gridfed {
namespace {

RunOptions short_run(QosMode qos, double duration = 200, std::optional<double> fail_at = 100) {
  RunOptions o;
  o.cfg.duration_s = duration;
  o.cfg.qos = qos;
  o.cfg.lte_fail_at_s = fail_at;
  return o;
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST(Scenario, TransportNames) {
  EXPECT_EQ(transport_from_string("inproc"), TransportKind::InProcess);
  EXPECT_EQ(transport_from_string("socket"), TransportKind::Socket);
  EXPECT_FALSE(transport_from_string("pigeon"));
  EXPECT_EQ(to_string(TransportKind::Socket), "socket");
}

TEST(Scenario, ShortRunBasics) {
  const auto r = run_scenario(short_run(QosMode::Fifo, 200, std::nullopt));
  EXPECT_EQ(r.federation.slots_executed, 20000);
  EXPECT_EQ(r.run_end, SimTime::from_seconds(200));
  EXPECT_EQ(r.nodes.size(), 365u);
  EXPECT_EQ(r.federation.messages_published, r.federation.messages_delivered);
  EXPECT_EQ(r.unknown_correlations, 0u);
  EXPECT_EQ(r.reliability.size(), 8u * 2);
  for (const auto& m : r.reliability) {
    if (m.cls == MessageClass::Monitoring) {
      ASSERT_TRUE(m.mean);
      EXPECT_EQ(*m.mean, 1.0) << "interval " << m.interval;
    }
  }
  EXPECT_GT(r.ddf.message_count, 1000u);
}

TEST(Scenario, SynchronizationBoundPerExchange) {
  const auto opts = short_run(QosMode::WfqRa);
  const auto r = run_scenario(opts);
  const SimTime bound = opts.cfg.tau() * 4;
  std::size_t checked = 0;
  for (const auto& ex : r.exchanges) {
    const auto it = ex.d_it();
    const auto comm = ex.d_comm();
    if (!it || !comm) continue;
    const auto gap = *it - *comm;
    EXPECT_GE(gap.ticks(), 0);
    EXPECT_LE(gap, bound);
    // IT delay dominates on each leg too.
    EXPECT_GE(*ex.request.delivered_at_it - ex.request.created_at_it, *ex.request.comm_delay());
    ++checked;
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Scenario, ConservationPerClass) {
  const auto r = run_scenario(short_run(QosMode::Fifo));
  for (std::size_t c = 0; c < kMessageClassCount; ++c) {
    const auto& n = r.net_counters[c];
    EXPECT_EQ(r.it_published[c], n.received + r.pending_to_net[c]);
    EXPECT_EQ(n.received, n.delivered + n.lost_to_failure + n.dropped_no_route +
                              n.dropped_overflow + r.net_in_flight[c]);
  }
  EXPECT_GT(r.net_counters[0].lost_to_failure, 0u);
  EXPECT_GT(r.net_in_flight[0], 0u);
}

TEST(Scenario, DeterministicOutputs) {
  const auto a = run_scenario(short_run(QosMode::Wfq));
  const auto b = run_scenario(short_run(QosMode::Wfq));
  const auto w = a.cfg.metrics_interval();
  EXPECT_EQ(reliability_csv(a.reliability, w), reliability_csv(b.reliability, w));
  EXPECT_EQ(delay_csv(a.delay, w), delay_csv(b.delay, w));
  EXPECT_EQ(exchange_log_csv(a.exchanges, a.cfg), exchange_log_csv(b.exchanges, b.cfg));
}

TEST(Scenario, SocketTraceMatchesInProcess) {
  auto opts = short_run(QosMode::WfqRa, 60, 30);
  opts.record_trace = true;
  const auto inproc = run_scenario(opts);
  opts.transport = TransportKind::Socket;
  const auto socket = run_scenario(opts);
  ASSERT_GT(inproc.trace.size(), 1000u);
  EXPECT_EQ(inproc.trace, socket.trace);
  const auto w = opts.cfg.metrics_interval();
  EXPECT_EQ(reliability_csv(inproc.reliability, w), reliability_csv(socket.reliability, w));
  EXPECT_EQ(socket.rate_updates, 1u);
}

TEST(Scenario, ZeroDuration) {
  const auto r = run_scenario(short_run(QosMode::Fifo, 0, std::nullopt));
  EXPECT_EQ(r.federation.slots_executed, 0);
  EXPECT_TRUE(r.exchanges.empty());
  EXPECT_TRUE(r.reliability.empty());
  const auto w = r.cfg.metrics_interval();
  EXPECT_EQ(line_count(reliability_csv(r.reliability, w)), 1u);
  EXPECT_EQ(line_count(delay_csv(r.delay, w)), 1u);
}

TEST(Scenario, InvalidConfigRejected) {
  auto opts = short_run(QosMode::Fifo);
  opts.cfg.tau_s = 0;
  EXPECT_THROW(run_scenario(opts), ValidationError);
}

TEST(Sweep, NeedsTwoTaus) {
  const std::vector<double> one{0.1};
  EXPECT_THROW(run_tau_sweep(short_run(QosMode::Fifo), one), UsageError);
  const std::vector<double> two{1, 0.1};
  EXPECT_THROW(run_tau_sweep(short_run(QosMode::Fifo), two, 0), UsageError);
  EXPECT_THROW(run_tau_sweep(short_run(QosMode::Fifo), two, 1, -1.0), UsageError);
}

TEST(Sweep, DdfFallsWithTau) {
  const std::vector<double> taus{1, 0.1, 0.01};
  const auto rows = run_tau_sweep(short_run(QosMode::Fifo, 200, std::nullopt), taus, 1);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].tau_s, taus[i]);
  EXPECT_GE(rows[0].ddf.ddf_percent, rows[1].ddf.ddf_percent);
  EXPECT_GE(rows[1].ddf.ddf_percent, rows[2].ddf.ddf_percent);
  const auto csv = ddf_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tau_s,ddf_percent,wallclock_s");
  EXPECT_EQ(line_count(csv), 4u);
}

TEST(Sweep, MinTimeStopsOnEmptyRuns) {
  auto opts = short_run(QosMode::Fifo);
  opts.cfg.duration_s = 0;
  const std::vector<double> taus{1, 0.1};
  const auto rows = run_tau_sweep(opts, taus, 1, 10.0);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].ddf.message_count, 0u);
}

TEST(Output, Headers) {
  auto first_line = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  EXPECT_EQ(first_line(reliability_csv({}, SimTime::from_seconds(25))),
            "t_s,class,mean,ci_low,ci_high,clamped_low,clamped_high");
  EXPECT_EQ(first_line(delay_csv({}, SimTime::from_seconds(25))), "t_s,class,mean_s,p95_s");
  EXPECT_EQ(first_line(ddf_csv({})), "tau_s,ddf_percent,wallclock_s");
  EXPECT_EQ(first_line(exchange_log_csv({}, ScenarioConfig{})),
            "id,class,node,created_s,delivered_s,d_it_s,d_comm_s,within_limit");
  EXPECT_EQ(first_line(link_log_csv({})),
            "t_s,link,queue_bytes_monitoring,queue_bytes_control,bits_served,bits_offered");
  EXPECT_EQ(first_line(topology_csv({})), "id,kind,x_km,y_km");
}

TEST(Output, ReliabilityRows) {
  IntervalMetrics m;
  m.interval = 1;
  m.cls = MessageClass::Control;
  m.mean = 0.75;
  m.ci_half_width = 0.5;
  IntervalMetrics absent;
  absent.interval = 2;
  const std::vector<IntervalMetrics> rows{m, absent};
  EXPECT_EQ(reliability_csv(rows, SimTime::from_seconds(25)),
            "t_s,class,mean,ci_low,ci_high,clamped_low,clamped_high\n"
            "50,control,0.75,0.25,1.25,0.25,1\n"
            "75,monitoring,,,,,\n");
}

TEST(Output, FormatDouble) {
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1600), "1600");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Output, ManifestIsJson) {
  RunManifest m;
  m.version = "1.2.3";
  m.transport = "inproc";
  m.outputs = {"reliability.csv"};
  m.experiments.push_back({"run", "ok", ""});
  const auto text = manifest_json(m);
  EXPECT_NE(text.find("\"version\""), std::string::npos);
  EXPECT_NE(text.find("\"seed\""), std::string::npos);
  EXPECT_NE(text.find("reliability.csv"), std::string::npos);
  EXPECT_FALSE(library_version().empty());
}

} // namespace
} // namespace gridfed
