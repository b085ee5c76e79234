#include "gridfed/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "gridfed/errors.hpp"

namespace gridfed {

std::string_view to_string(MessageClass c) {
  return c == MessageClass::Monitoring ? "monitoring" : "control";
}

std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::Request:
      return "request";
    case MessageKind::Response:
      return "response";
    case MessageKind::ControlCommand:
      return "control_command";
    case MessageKind::ControlAck:
      return "control_ack";
    case MessageKind::RateUpdate:
      return "rate_update";
  }
  return "?";
}

std::optional<MessageClass> message_class_from_string(std::string_view s) {
  if (s == "monitoring") return MessageClass::Monitoring;
  if (s == "control") return MessageClass::Control;
  return std::nullopt;
}

std::optional<MessageKind> message_kind_from_string(std::string_view s) {
  for (auto k : {MessageKind::Request, MessageKind::Response, MessageKind::ControlCommand,
                 MessageKind::ControlAck, MessageKind::RateUpdate}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(QosMode q) {
  switch (q) {
    case QosMode::Fifo:
      return "fifo";
    case QosMode::Wfq:
      return "wfq";
    case QosMode::WfqRa:
      return "wfq-ra";
  }
  return "?";
}

std::optional<QosMode> qos_from_string(std::string_view s) {
  if (s == "fifo") return QosMode::Fifo;
  if (s == "wfq") return QosMode::Wfq;
  if (s == "wfq-ra" || s == "wfq_ra") return QosMode::WfqRa;
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view v) {
  // Accept plain decimals and simple fractions such as "1/30".
  const auto slash = v.find('/');
  if (slash != std::string_view::npos) {
    const double num = parse_double(key, trim(v.substr(0, slash)));
    const double den = parse_double(key, trim(v.substr(slash + 1)));
    if (den == 0.0) throw ValidationError(std::string(key), "division by zero");
    return num / den;
  }
  double out = 0.0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError(std::string(key), "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), last, out);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError(std::string(key), "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError(std::string(key), "expected true/false");
}

std::optional<double> parse_optional_seconds(std::string_view key, std::string_view v) {
  if (v == "none" || v.empty()) return std::nullopt;
  return parse_double(key, v);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

struct KeySpec {
  std::string_view key;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <typename Member>
KeySpec double_key(std::string_view key, Member member) {
  return {
      key,
      [key, member](ScenarioConfig& c, std::string_view v) { c.*member = parse_double(key, v); },
      [member](const ScenarioConfig& c) { return format_double(c.*member); }};
}

template <typename Int, typename Getter>
KeySpec int_key(std::string_view key, Getter field) {
  return {
      key,
      [key, field](ScenarioConfig& c, std::string_view v) { field(c) = parse_int<Int>(key, v); },
      [field](const ScenarioConfig& c) { return std::to_string(field(c)); }};
}

const std::vector<KeySpec>& key_table() {
  using C = ScenarioConfig;
  static const std::vector<KeySpec> table = {
      double_key("tau_s", &C::tau_s),
      double_key("duration_s", &C::duration_s),
      int_key<std::uint64_t>("seed", [](auto& c) -> auto& { return c.seed; }),
      double_key("lambda_m_hz", &C::lambda_m_hz),
      double_key("lambda_c_hz", &C::lambda_c_hz),
      int_key<std::uint32_t>("control_burst_size",
                             [](auto& c) -> auto& { return c.control_burst_size; }),
      {"arrivals",
       [](C& c, std::string_view v) {
         if (v == "periodic")
           c.arrivals = ArrivalProcess::Periodic;
         else if (v == "poisson")
           c.arrivals = ArrivalProcess::Poisson;
         else
           throw ValidationError("arrivals", "expected periodic|poisson");
       },
       [](const C& c) {
         return std::string(c.arrivals == ArrivalProcess::Periodic ? "periodic" : "poisson");
       }},
      int_key<std::uint32_t>("payload_dms_monitoring_bytes",
                             [](auto& c) -> auto& { return c.payload.dms_monitoring; }),
      int_key<std::uint32_t>("payload_dms_control_bytes",
                             [](auto& c) -> auto& { return c.payload.dms_control; }),
      int_key<std::uint32_t>("payload_hvalv_bytes",
                             [](auto& c) -> auto& { return c.payload.hvalv; }),
      int_key<std::uint32_t>("payload_substation_bytes",
                             [](auto& c) -> auto& { return c.payload.substation; }),
      int_key<std::uint32_t>("payload_der_bytes", [](auto& c) -> auto& { return c.payload.der; }),
      int_key<std::uint32_t>("payload_switch_bytes",
                             [](auto& c) -> auto& { return c.payload.switch_ack; }),
      double_key("delay_limit_monitoring_s", &C::delay_limit_monitoring_s),
      double_key("delay_limit_control_s", &C::delay_limit_control_s),
      int_key<std::uint32_t>("lte_bs_count", [](auto& c) -> auto& { return c.lte_bs_count; }),
      double_key("lte_bs_capacity_bps", &C::lte_bs_capacity_bps),
      double_key("dmr_capacity_bps", &C::dmr_capacity_bps),
      double_key("access_latency_lte_s", &C::access_latency_lte_s),
      double_key("access_latency_dmr_s", &C::access_latency_dmr_s),
      {"qos",
       [](C& c, std::string_view v) {
         auto q = qos_from_string(v);
         if (!q) throw ValidationError("qos", "expected fifo|wfq|wfq-ra");
         c.qos = *q;
       },
       [](const C& c) { return std::string(to_string(c.qos)); }},
      double_key("wfq_weight_monitoring", &C::wfq_weight_monitoring),
      double_key("wfq_weight_control", &C::wfq_weight_control),
      double_key("alpha_e", &C::alpha_e),
      {"ra_literal_formula",
       [](C& c, std::string_view v) { c.ra_literal_formula = parse_bool("ra_literal_formula", v); },
       [](const C& c) { return std::string(c.ra_literal_formula ? "true" : "false"); }},
      {"lte_fail_at_s",
       [](C& c, std::string_view v) {
         c.lte_fail_at_s = parse_optional_seconds("lte_fail_at_s", v);
       },
       [](const C& c) { return c.lte_fail_at_s ? format_double(*c.lte_fail_at_s) : "none"; }},
      {"lte_restore_at_s",
       [](C& c, std::string_view v) {
         c.lte_restore_at_s = parse_optional_seconds("lte_restore_at_s", v);
       },
       [](const C& c) { return c.lte_restore_at_s ? format_double(*c.lte_restore_at_s) : "none"; }},
      double_key("metrics_interval_s", &C::metrics_interval_s),
      int_key<std::uint32_t>("count_hvalv", [](auto& c) -> auto& { return c.counts.hvalv; }),
      int_key<std::uint32_t>("count_switch", [](auto& c) -> auto& { return c.counts.switches; }),
      int_key<std::uint32_t>("count_substation",
                             [](auto& c) -> auto& { return c.counts.substation; }),
      int_key<std::uint32_t>("count_pv", [](auto& c) -> auto& { return c.counts.pv; }),
      int_key<std::uint32_t>("count_wind", [](auto& c) -> auto& { return c.counts.wind; }),
      int_key<std::uint32_t>("count_dms", [](auto& c) -> auto& { return c.counts.dms; }),
      int_key<std::uint32_t>("count_dmr_ap", [](auto& c) -> auto& { return c.counts.dmr_ap; }),
      double_key("region_side_km", &C::region_side_km),
      int_key<std::uint32_t>("header_bytes", [](auto& c) -> auto& { return c.header_bytes; }),
      int_key<std::uint32_t>("mss_bytes", [](auto& c) -> auto& { return c.mss_bytes; }),
      int_key<std::uint32_t>("ack_bytes", [](auto& c) -> auto& { return c.ack_bytes; }),
      int_key<std::uint64_t>("queue_limit_bytes",
                             [](auto& c) -> auto& { return c.queue_limit_bytes; }),
      {"der_control_via",
       [](C& c, std::string_view v) {
         if (v == "lte")
           c.der_control_via = DerControlVia::Lte;
         else if (v == "dmr")
           c.der_control_via = DerControlVia::Dmr;
         else
           throw ValidationError("der_control_via", "expected lte|dmr");
       },
       [](const C& c) {
         return std::string(c.der_control_via == DerControlVia::Lte ? "lte" : "dmr");
       }},
      double_key("der_control_rate_hz", &C::der_control_rate_hz),
  };
  return table;
}

void require(bool ok, const char* key, const char* detail) {
  if (!ok) throw ValidationError(key, detail);
}

} // namespace

SimTime ScenarioConfig::tau() const {
  return SimTime::from_seconds(tau_s, "tau_s");
}
SimTime ScenarioConfig::duration() const {
  return SimTime::from_seconds(duration_s, "duration_s");
}
SimTime ScenarioConfig::metrics_interval() const {
  return SimTime::from_seconds(metrics_interval_s, "metrics_interval_s");
}
SimTime ScenarioConfig::delay_limit(MessageClass c) const {
  return c == MessageClass::Monitoring
             ? SimTime::from_seconds(delay_limit_monitoring_s, "delay_limit_monitoring_s")
             : SimTime::from_seconds(delay_limit_control_s, "delay_limit_control_s");
}
std::optional<SimTime> ScenarioConfig::lte_fail_at() const {
  if (!lte_fail_at_s) return std::nullopt;
  return SimTime::from_seconds(*lte_fail_at_s, "lte_fail_at_s");
}
std::optional<SimTime> ScenarioConfig::lte_restore_at() const {
  if (!lte_restore_at_s) return std::nullopt;
  return SimTime::from_seconds(*lte_restore_at_s, "lte_restore_at_s");
}

void validate(const ScenarioConfig& c) {
  require(c.tau_s > 0.0, "tau_s", "must be > 0");
  const SimTime tau = c.tau();
  require(tau.ticks() > 0, "tau_s", "must be at least one base unit");
  require(c.duration_s >= 0.0, "duration_s", "must be >= 0");
  (void)c.duration();
  require(c.metrics_interval_s > 0.0, "metrics_interval_s", "must be > 0");
  require(c.metrics_interval().ticks() % tau.ticks() == 0, "metrics_interval_s",
          "must be a multiple of tau_s");

  require(std::isfinite(c.lambda_m_hz) && c.lambda_m_hz > 0.0, "lambda_m_hz", "must be > 0");
  require(std::isfinite(c.lambda_c_hz) && c.lambda_c_hz >= 0.0, "lambda_c_hz", "must be >= 0");
  require(c.control_burst_size >= 1, "control_burst_size", "must be >= 1");

  require(c.payload.dms_monitoring > 0, "payload_dms_monitoring_bytes", "must be > 0");
  require(c.payload.dms_control > 0, "payload_dms_control_bytes", "must be > 0");
  require(c.payload.hvalv > 0, "payload_hvalv_bytes", "must be > 0");
  require(c.payload.substation > 0, "payload_substation_bytes", "must be > 0");
  require(c.payload.der > 0, "payload_der_bytes", "must be > 0");
  require(c.payload.switch_ack > 0, "payload_switch_bytes", "must be > 0");

  require(c.delay_limit_monitoring_s > 0.0, "delay_limit_monitoring_s", "must be > 0");
  require(c.delay_limit_control_s > 0.0, "delay_limit_control_s", "must be > 0");
  (void)c.delay_limit(MessageClass::Monitoring);
  (void)c.delay_limit(MessageClass::Control);

  require(std::isfinite(c.lte_bs_capacity_bps) && c.lte_bs_capacity_bps > 0.0,
          "lte_bs_capacity_bps", "must be > 0");
  require(std::isfinite(c.dmr_capacity_bps) && c.dmr_capacity_bps > 0.0, "dmr_capacity_bps",
          "must be > 0");
  require(c.access_latency_lte_s >= 0.0, "access_latency_lte_s", "must be >= 0");
  require(c.access_latency_dmr_s >= 0.0, "access_latency_dmr_s", "must be >= 0");
  (void)SimTime::from_seconds(c.access_latency_lte_s, "access_latency_lte_s");
  (void)SimTime::from_seconds(c.access_latency_dmr_s, "access_latency_dmr_s");

  require(c.wfq_weight_monitoring > 0.0, "wfq_weight_monitoring", "must be > 0");
  require(c.wfq_weight_control > 0.0, "wfq_weight_control", "must be > 0");
  require(c.alpha_e >= 0.0 && c.alpha_e < 1.0, "alpha_e", "must satisfy 0 <= alpha_e < 1");

  if (c.lte_fail_at_s) {
    require(*c.lte_fail_at_s >= 0.0, "lte_fail_at_s", "must be >= 0");
    (void)c.lte_fail_at();
  }
  if (c.lte_restore_at_s) {
    require(*c.lte_restore_at_s >= 0.0, "lte_restore_at_s", "must be >= 0");
    (void)c.lte_restore_at();
    require(c.lte_fail_at_s && *c.lte_restore_at_s > *c.lte_fail_at_s, "lte_restore_at_s",
            "must come after lte_fail_at_s");
  }

  require(c.counts.dms == 1, "count_dms", "exactly one DMS is required");
  require(c.counts.dmr_ap == 1, "count_dmr_ap", "exactly one DMR access point is required");
  require(c.region_side_km > 0.0, "region_side_km", "must be > 0");

  require(c.mss_bytes > 0, "mss_bytes", "must be > 0");
  require(c.ack_bytes > 0, "ack_bytes", "must be > 0");
  require(c.der_control_rate_hz >= 0.0, "der_control_rate_hz", "must be >= 0");
}

void apply_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& spec : key_table()) {
    if (spec.key == key) {
      spec.set(cfg, trim(value));
      return;
    }
  }
  throw ValidationError(std::string(key), "unknown configuration key");
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("missing key", line_no);
    bool known = false;
    for (const auto& spec : key_table()) known = known || spec.key == key;
    if (!known) throw ParseError("unknown key '" + std::string(key) + "'", line_no);
    apply_config_value(cfg, key, line.substr(eq + 1));
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& spec : key_table()) {
    out += spec.key;
    out += " = ";
    out += spec.get(cfg);
    out += '\n';
  }
  return out;
}

} // namespace gridfed
