#include "gridfed/output.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gridfed/errors.hpp"

#ifndef GRIDFED_VERSION
#define GRIDFED_VERSION "unknown"
#endif

namespace gridfed {

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

namespace {

std::string seconds(SimTime t) {
  return format_double(t.seconds());
}

std::string interval_end(IntervalIndex i, SimTime interval) {
  return seconds(interval * (i + 1));
}

} // namespace

std::string reliability_csv(std::span<const IntervalMetrics> rows, SimTime interval) {
  std::ostringstream os;
  os << "t_s,class,mean,ci_low,ci_high,clamped_low,clamped_high\n";
  for (const auto& r : rows) {
    os << interval_end(r.interval, interval) << ',' << to_string(r.cls);
    if (r.mean) {
      os << ',' << format_double(*r.mean) << ',' << format_double(r.ci_low()) << ','
         << format_double(r.ci_high()) << ',' << format_double(r.clamped_low()) << ','
         << format_double(r.clamped_high());
    } else {
      os << ",,,,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string delay_csv(std::span<const DelayStats> rows, SimTime interval) {
  std::ostringstream os;
  os << "t_s,class,mean_s,p95_s\n";
  for (const auto& r : rows) {
    os << interval_end(r.interval, interval) << ',' << to_string(r.cls);
    if (r.count > 0) {
      os << ',' << format_double(r.mean_s) << ',' << format_double(r.p95_s);
    } else {
      os << ",,";
    }
    os << '\n';
  }
  return os.str();
}

std::string ddf_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "tau_s,ddf_percent,wallclock_s\n";
  for (const auto& r : rows) {
    if (r.ddf.message_count == 0) continue;
    os << format_double(r.tau_s) << ',' << format_double(r.ddf.ddf_percent) << ','
       << format_double(r.wallclock_s) << '\n';
  }
  return os.str();
}

std::string exchange_log_csv(std::span<const ExchangeRecord> exchanges, const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "id,class,node,created_s,delivered_s,d_it_s,d_comm_s,within_limit\n";
  for (const auto& ex : exchanges) {
    const auto d_it = ex.d_it();
    const auto d_comm = ex.d_comm();
    os << ex.request.id << ',' << to_string(ex.cls) << ',' << ex.node << ','
       << seconds(ex.request.created_at_it) << ',';
    if (d_it) os << seconds(*ex.response->delivered_at_it);
    os << ',';
    if (d_it) os << seconds(*d_it);
    os << ',';
    if (d_comm) os << seconds(*d_comm);
    os << ',' << (d_it && *d_it <= cfg.delay_limit(ex.cls) ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string link_log_csv(std::span<const LinkSample> samples) {
  std::ostringstream os;
  os << "t_s,link,queue_bytes_monitoring,queue_bytes_control,bits_served,bits_offered\n";
  for (const auto& s : samples) {
    os << seconds(s.t) << ',' << s.link << ',' << s.queue_bytes_monitoring << ','
       << s.queue_bytes_control << ',' << s.bits_served << ',' << s.bits_offered << '\n';
  }
  return os.str();
}

std::string topology_csv(std::span<const NodeDescriptor> nodes) {
  std::ostringstream os;
  os << "id,kind,x_km,y_km\n";
  for (const auto& n : nodes) {
    os << n.id << ',' << to_string(n.kind) << ',' << format_double(n.position.x_km) << ','
       << format_double(n.position.y_km) << '\n';
  }
  return os.str();
}

std::string trace_csv(std::span<const DeliveryRecord> trace) {
  std::ostringstream os;
  os << "slot,from,to,published_ticks,delivered_ticks,id,kind,class\n";
  for (const auto& r : trace) {
    os << r.slot << ',' << r.from << ',' << r.to << ',' << r.published_at.ticks() << ','
       << r.delivered_at.ticks() << ',' << r.id << ',' << to_string(r.kind) << ','
       << to_string(r.cls) << '\n';
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["version"] = m.version;
  j["seed"] = m.cfg.seed;
  j["transport"] = m.transport;

  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  std::istringstream lines(serialize_config(m.cfg));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    cfg[line.substr(0, eq)] = line.substr(eq + 3);
  }
  j["config"] = std::move(cfg);
  j["wallclock_s"] = m.wallclock_s;
  j["federate_wallclock_s"] = m.federate_wallclock_s;
  j["outputs"] = m.outputs;
  auto experiments = nlohmann::ordered_json::array();
  for (const auto& e : m.experiments) {
    nlohmann::ordered_json x;
    x["name"] = e.name;
    x["status"] = e.status;
    if (!e.detail.empty()) x["detail"] = e.detail;
    experiments.push_back(std::move(x));
  }
  j["experiments"] = std::move(experiments);
  return j.dump(2) + "\n";
}

std::string_view library_version() {
  return GRIDFED_VERSION;
}

} // namespace gridfed
