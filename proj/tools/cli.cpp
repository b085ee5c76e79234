#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gridfed/errors.hpp"
#include "gridfed/it_federate.hpp"
#include "gridfed/output.hpp"
#include "gridfed/scenario.hpp"

namespace gridfed::cli {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config_path;
  std::optional<double> tau;
  std::optional<std::string> qos;
  std::optional<double> fail_at;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  bool eq5_literal = false;
};

void add_common(CLI::App& app, CommonFlags& f) {
  app.add_option("--config", f.config_path, "Scenario config file (key = value)");
  app.add_option("--tau", f.tau, "Timeslot duration in seconds");
  app.add_option("--qos", f.qos, "DMR queueing: fifo, wfq or wfq-ra");
  app.add_option("--fail-at", f.fail_at, "Simulated time at which every LTE cell fails");
  app.add_option("--duration", f.duration, "Simulated duration in seconds");
  app.add_option("--seed", f.seed, "Random seed");
  app.add_option("--out", f.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--eq5-literal", f.eq5_literal,
               "Use the literal rate adaptation expression instead of the load-bounded one");
}

ScenarioConfig build_config(const CommonFlags& f) {
  ScenarioConfig cfg = f.config_path.empty() ? ScenarioConfig{} : load_config(f.config_path);
  if (f.tau) cfg.tau_s = *f.tau;
  if (f.qos) {
    const auto q = qos_from_string(*f.qos);
    if (!q) throw UsageError("unknown --qos value '" + *f.qos + "'");
    cfg.qos = *q;
  }
  if (f.fail_at) cfg.lte_fail_at_s = *f.fail_at;
  if (f.duration) cfg.duration_s = *f.duration;
  if (f.seed) cfg.seed = *f.seed;
  if (f.eq5_literal) cfg.ra_literal_formula = true;
  validate(cfg);
  return cfg;
}

std::vector<double> parse_tau_list(const std::vector<std::string>& items) {
  std::vector<double> taus;
  for (const auto& item : items) {
    std::stringstream ss(item);
    for (std::string part; std::getline(ss, part, ',');) {
      if (part.empty()) continue;
      try {
        std::size_t used = 0;
        taus.push_back(std::stod(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw UsageError("invalid tau value '" + part + "'");
      }
    }
  }
  return taus;
}

class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    names_.push_back(name);
  }
  const std::vector<std::string>& names() const { return names_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

void write_run_outputs(OutputSet& out, const ScenarioResult& r, bool exchange_log, bool link_log,
                       bool dump_topology, bool trace) {
  const auto interval = r.cfg.metrics_interval();
  out.write("reliability.csv", reliability_csv(r.reliability, interval));
  out.write("delay.csv", delay_csv(r.delay, interval));
  const SweepRow row{r.cfg.tau_s, r.ddf, r.federation.wallclock_s};
  out.write("ddf.csv", ddf_csv(std::span<const SweepRow>(&row, 1)));
  if (exchange_log) out.write("exchange_log.csv", exchange_log_csv(r.exchanges, r.cfg));
  if (link_log) out.write("link_log.csv", link_log_csv(r.link_samples));
  if (dump_topology) out.write("topology.csv", topology_csv(r.nodes));
  if (trace) out.write("trace.csv", trace_csv(r.trace));
}

void print_summary(std::ostream& os, const ScenarioResult& r) {
  os << "slots=" << r.federation.slots_executed << " published=" << r.federation.messages_published
     << " delivered=" << r.federation.messages_delivered
     << " wallclock_s=" << format_double(r.federation.wallclock_s)
     << " ddf_percent=" << format_double(r.ddf.ddf_percent) << '\n';
}

/// RTI for federates running in other processes.
FederationResult run_rti_for_external(const ScenarioConfig& cfg, const SocketAddress& listen,
                                      std::chrono::milliseconds timeout,
                                      std::vector<DeliveryRecord>* trace, std::ostream& os) {
  Rti rti(cfg.tau());
  if (trace) rti.set_delivery_observer([trace](const DeliveryRecord& r) { trace->push_back(r); });
  TcpListener listener(listen);
  os << "rti listening on " << listen.host << ':' << listener.port() << '\n' << std::flush;
  const std::vector<std::string> expected{kItFederateName, kNetFederateName};
  try {
    accept_federates(rti, listener, expected, timeout);
    rti.run(cfg.duration());
  } catch (...) {
    rti.finish();
    throw;
  }
  rti.finish();
  return rti.result();
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-stepped IT and communication co-simulation of a telecontrol network",
               "gridfed"};
  app.set_version_flag("--version", std::string(library_version()));

  CommonFlags run_flags;
  add_common(app, run_flags);
  std::string transport = "inproc";
  std::string rti_listen = "127.0.0.1:0";
  bool external = false;
  bool dump_topology = false;
  bool exchange_log = false;
  bool link_log = false;
  bool trace = false;
  int timeout_s = 30;
  app.add_option("--transport", transport, "Federate transport: inproc or socket")
      ->capture_default_str();
  app.add_option("--rti-listen", rti_listen, "RTI address for the socket transport (host:port)")
      ->capture_default_str();
  app.add_flag("--external-federates", external,
               "Wait for federates started separately with `gridfed federate`");
  app.add_flag("--dump-topology", dump_topology, "Write topology.csv");
  app.add_flag("--exchange-log", exchange_log, "Write exchange_log.csv");
  app.add_flag("--link-log", link_log, "Write link_log.csv");
  app.add_flag("--trace", trace, "Write the delivered-message trace to trace.csv");
  app.add_option("--timeout", timeout_s, "Seconds to wait for a federate")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Run once per timeslot duration and write ddf.csv");
  CommonFlags sweep_flags;
  add_common(*sweep, sweep_flags);
  std::vector<std::string> tau_items;
  int repeat = 5;
  double min_time = 1.0;
  std::string sweep_transport = "inproc";
  sweep->add_option("--taus", tau_items, "Timeslot durations, comma separated")->required();
  sweep->add_option("--repeat", repeat, "Runs per tau; the fastest wallclock is kept")
      ->capture_default_str();
  sweep->add_option("--transport", sweep_transport, "Federate transport: inproc or socket")
      ->capture_default_str();
  sweep->add_option("--min-time", min_time, "Keep repeating a tau until its runs add up to this")
      ->capture_default_str();

  auto* federate = app.add_subcommand("federate", "Run one federate against a remote RTI");
  CommonFlags fed_flags;
  add_common(*federate, fed_flags);
  std::string role;
  std::string connect;
  federate->add_option("--role", role, "it or net")->required();
  federate->add_option("--connect", connect, "RTI address (host:port)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const auto timeout = std::chrono::milliseconds(timeout_s * 1000);

  if (*sweep) {
    try {
      RunOptions opts;
      opts.cfg = build_config(sweep_flags);
      const auto kind = transport_from_string(sweep_transport);
      if (!kind) throw UsageError("--transport must be 'inproc' or 'socket'");
      opts.transport = *kind;
      const auto taus = parse_tau_list(tau_items);
      if (taus.size() < 2) throw UsageError("--taus needs at least two values");
      const auto rows = run_tau_sweep(opts, taus, repeat, min_time);
      fs::create_directories(sweep_flags.out_dir);
      write_text(fs::path(sweep_flags.out_dir) / "ddf.csv", ddf_csv(rows));
      out << ddf_csv(rows);
      return 0;
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }

  if (*federate) {
    try {
      const auto cfg = build_config(fed_flags);
      const auto addr = SocketAddress::parse(connect);
      const Topology topo(generate_topology(cfg, cfg.seed));
      if (role == "net") {
        NetFederate net(cfg, topo);
        run_federate_client(addr, kNetFederateName, net, timeout);
        return 0;
      }
      if (role != "it") throw UsageError("--role must be 'it' or 'net'");
      ItFederate it(cfg, topo);
      const auto t0 = std::chrono::steady_clock::now();
      run_federate_client(addr, kItFederateName, it, timeout);
      // The IT side owns the exchanges, so it writes the metric files.
      ScenarioResult r;
      r.cfg = cfg;
      r.nodes = topo.nodes();
      r.exchanges = it.exchanges();
      r.run_end = cfg.duration();
      r.federation.wallclock_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      evaluate_metrics(r);
      fs::create_directories(fed_flags.out_dir);
      OutputSet outputs(fed_flags.out_dir);
      write_run_outputs(outputs, r, true, false, false, false);
      return 0;
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }

  // Default command: one scenario run.
  RunManifest manifest;
  manifest.version = std::string(library_version());
  manifest.transport = transport;
  std::optional<OutputSet> outputs;
  int code = 0;
  try {
    fs::create_directories(run_flags.out_dir);
    outputs.emplace(run_flags.out_dir);
    RunOptions opts;
    opts.cfg = build_config(run_flags);
    manifest.cfg = opts.cfg;
    const auto kind = transport_from_string(transport);
    if (!kind) throw UsageError("--transport must be 'inproc' or 'socket'");
    opts.transport = *kind;
    opts.rti_listen = SocketAddress::parse(rti_listen);
    opts.timeout = timeout;
    opts.record_trace = trace;

    if (external) {
      if (opts.transport != TransportKind::Socket) {
        throw UsageError("--external-federates requires --transport socket");
      }
      std::vector<DeliveryRecord> records;
      const auto result =
          run_rti_for_external(opts.cfg, opts.rti_listen, timeout, trace ? &records : nullptr, out);
      manifest.wallclock_s = result.wallclock_s;
      manifest.federate_wallclock_s = result.federate_wallclock_s;
      if (trace) outputs->write("trace.csv", trace_csv(records));
      manifest.experiments.push_back({"run", "ok", "metrics written by the it federate"});
    } else {
      const auto result = run_scenario(opts);
      manifest.wallclock_s = result.federation.wallclock_s;
      manifest.federate_wallclock_s = result.federation.federate_wallclock_s;
      write_run_outputs(*outputs, result, exchange_log, link_log, dump_topology, trace);
      print_summary(out, result);
      manifest.experiments.push_back({"run", "ok", ""});
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    manifest.experiments.push_back({"run", "error", e.what()});
    code = 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    manifest.experiments.push_back({"run", "error", e.what()});
    code = 1;
  }

  if (outputs) {
    try {
      manifest.outputs = outputs->names();
      write_text(outputs->dir() / "manifest.json", manifest_json(manifest));
    } catch (const std::exception& e) {
      err << "error: cannot write manifest: " << e.what() << '\n';
      if (code == 0) code = 1;
    }
  }
  return code;
}

} // namespace gridfed::cli
