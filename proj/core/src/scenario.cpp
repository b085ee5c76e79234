#include "gridfed/scenario.hpp"

#include <exception>
#include <thread>

#include "gridfed/errors.hpp"
#include "gridfed/it_federate.hpp"

namespace gridfed {

std::string_view to_string(TransportKind t) {
  return t == TransportKind::InProcess ? "inproc" : "socket";
}

std::optional<TransportKind> transport_from_string(std::string_view s) {
  if (s == "inproc") return TransportKind::InProcess;
  if (s == "socket") return TransportKind::Socket;
  return std::nullopt;
}

namespace {

void run_over_sockets(Rti& rti, const RunOptions& options, Federate& it, Federate& net) {
  TcpListener listener(options.rti_listen);
  const SocketAddress addr{options.rti_listen.host, listener.port()};

  std::exception_ptr it_error;
  std::exception_ptr net_error;
  auto client = [&](const char* name, Federate& f, std::exception_ptr& error) {
    return std::thread([&, name] {
      try {
        run_federate_client(addr, name, f, options.timeout);
      } catch (...) {
        error = std::current_exception();
      }
    });
  };
  std::thread it_thread = client(kItFederateName, it, it_error);
  std::thread net_thread = client(kNetFederateName, net, net_error);

  std::exception_ptr rti_error;
  try {
    const std::vector<std::string> expected{kItFederateName, kNetFederateName};
    accept_federates(rti, listener, expected, options.timeout);
    rti.run(options.cfg.duration());
  } catch (...) {
    rti_error = std::current_exception();
  }
  // Closing the connections also unblocks clients after an RTI failure.
  rti.finish();
  it_thread.join();
  net_thread.join();
  if (rti_error) std::rethrow_exception(rti_error);
  if (it_error) std::rethrow_exception(it_error);
  if (net_error) std::rethrow_exception(net_error);
}

} // namespace

ScenarioResult run_scenario(const RunOptions& options) {
  validate(options.cfg);
  ScenarioResult result;
  result.cfg = options.cfg;
  result.nodes = generate_topology(options.cfg, options.cfg.seed);
  const Topology topo(result.nodes);

  ItFederate it(options.cfg, topo);
  NetFederate net(options.cfg, topo);
  Rti rti(options.cfg.tau());
  if (options.record_trace) {
    rti.set_delivery_observer([&](const DeliveryRecord& r) { result.trace.push_back(r); });
  }

  if (options.transport == TransportKind::InProcess) {
    rti.register_federate(kItFederateName, std::make_unique<InProcessEndpoint>(it));
    rti.register_federate(kNetFederateName, std::make_unique<InProcessEndpoint>(net));
    rti.run(options.cfg.duration());
    rti.finish();
  } else {
    run_over_sockets(rti, options, it, net);
  }

  result.federation = rti.result();
  result.run_end = options.cfg.tau() * result.federation.slots_executed;
  result.exchanges = it.exchanges();
  result.unknown_correlations = it.unknown_correlations();
  result.rate_updates = it.rate_updates();
  constexpr FederateId kNetId = 1;
  for (const auto& d : rti.pending_inbox(kNetId)) {
    if (d.msg.is_network_traffic()) ++result.pending_to_net[index_of(d.msg.cls)];
  }
  for (std::size_t c = 0; c < kMessageClassCount; ++c) {
    const auto cls = static_cast<MessageClass>(c);
    result.it_published[c] = it.published(cls);
    result.net_counters[c] = net.counters(cls);
    result.net_in_flight[c] = net.in_flight(cls);
  }
  result.link_samples = net.samples();
  for (const auto& l : net.links()) result.link_stats.push_back(l.stats());

  evaluate_metrics(result);
  return result;
}

void evaluate_metrics(ScenarioResult& result) {
  const auto& cfg = result.cfg;
  const std::array<SimTime, kMessageClassCount> limits{cfg.delay_limit(MessageClass::Monitoring),
                                                       cfg.delay_limit(MessageClass::Control)};
  result.reliability =
      reliability_series(result.exchanges, limits, cfg.metrics_interval(), result.run_end);
  const auto legs = leg_delays(result.exchanges);
  result.delay = delay_series(legs, cfg.metrics_interval(), result.run_end);
  result.ddf = ddf(delay_pairs(result.exchanges), cfg.tau_s);
}

std::vector<SweepRow> run_tau_sweep(const RunOptions& base, std::span<const double> taus,
                                    int repeat, double min_time_s) {
  if (taus.size() < 2) throw UsageError("a tau sweep needs at least two tau values");
  if (repeat < 1) throw UsageError("repeat must be at least 1");
  if (!(min_time_s >= 0.0)) throw UsageError("min time must not be negative");
  std::vector<SweepRow> rows(taus.size());
  std::vector<int> runs(taus.size(), 0);
  std::vector<double> spent(taus.size(), 0.0);
  // Empty runs never add up to min_time_s.
  constexpr int kMaxRuns = 1000;
  auto needs_more = [&](std::size_t i) {
    return runs[i] < repeat || (spent[i] < min_time_s && runs[i] < kMaxRuns);
  };
  // Rounds are interleaved across taus so slow drifts in machine speed hit
  // every tau alike instead of biasing whichever ran last.
  bool any = true;
  while (any) {
    any = false;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      if (!needs_more(i)) continue;
      any = true;
      RunOptions opts = base;
      opts.cfg.tau_s = taus[i];
      opts.record_trace = false;
      const auto res = run_scenario(opts);
      auto& row = rows[i];
      row.tau_s = taus[i];
      row.ddf = res.ddf;
      if (runs[i] == 0 || res.federation.wallclock_s < row.wallclock_s) {
        row.wallclock_s = res.federation.wallclock_s;
      }
      ++runs[i];
      spent[i] += res.federation.wallclock_s;
    }
  }
  return rows;
}

} // namespace gridfed
