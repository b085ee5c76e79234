#include "gridfed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridfed/errors.hpp"

namespace gridfed {

std::optional<double> node_reliability(std::span<const ExchangeRecord> exchanges, SimTime limit) {
  if (exchanges.empty()) return std::nullopt;
  std::size_t ok = 0;
  for (const auto& ex : exchanges) {
    const auto d = ex.d_it();
    if (d && *d <= limit) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(exchanges.size());
}

ClassReliability class_reliability_ci(std::span<const double> per_node) {
  if (per_node.empty()) throw EmptyDistribution();
  const double n = static_cast<double>(per_node.size());
  const double mean = std::accumulate(per_node.begin(), per_node.end(), 0.0) / n;
  if (per_node.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : per_node) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

ClassReliability class_reliability_ci(const std::map<NodeId, double>& per_node) {
  std::vector<double> values;
  values.reserve(per_node.size());
  for (const auto& [node, r] : per_node) values.push_back(r);
  return class_reliability_ci(values);
}

DdfReport ddf(std::span<const DelayPair> pairs, double tau_s) {
  DdfReport report;
  report.tau_s = tau_s;
  double rel_sum = 0.0;
  double gap_sum = 0.0;
  for (const auto& p : pairs) {
    if (p.d_comm_s == 0.0) {
      ++report.zero_comm_excluded;
      continue;
    }
    rel_sum += (p.d_it_s - p.d_comm_s) / p.d_comm_s;
    gap_sum += std::fabs(p.d_it_s - p.d_comm_s);
    ++report.message_count;
  }
  if (report.message_count > 0) {
    const double m = static_cast<double>(report.message_count);
    report.ddf_percent = 100.0 * rel_sum / m;
    report.mean_abs_gap_s = gap_sum / m;
  }
  return report;
}

std::vector<DelayPair> delay_pairs(std::span<const ExchangeRecord> exchanges) {
  std::vector<DelayPair> out;
  for (const auto& ex : exchanges) {
    const auto it = ex.d_it();
    const auto comm = ex.d_comm();
    if (it && comm) out.push_back({it->seconds(), comm->seconds()});
  }
  return out;
}

double IntervalMetrics::clamped_low() const {
  return std::clamp(ci_low(), 0.0, 1.0);
}
double IntervalMetrics::clamped_high() const {
  return std::clamp(ci_high(), 0.0, 1.0);
}

std::optional<IntervalIndex> outcome_interval(const ExchangeRecord& ex, SimTime limit,
                                              SimTime interval, SimTime run_end) {
  const auto d = ex.d_it();
  if (d && *d <= limit) return interval_of(*ex.response->delivered_at_it, interval);
  const SimTime failed_at = ex.request.created_at_it + limit;
  if (failed_at > run_end) return std::nullopt;
  return interval_of(failed_at, interval);
}

IntervalIndex interval_count(SimTime run_end, SimTime interval) {
  return (run_end.ticks() + interval.ticks() - 1) / interval.ticks();
}

std::vector<IntervalMetrics> reliability_series(std::span<const ExchangeRecord> exchanges,
                                                std::array<SimTime, kMessageClassCount> limits,
                                                SimTime interval, SimTime run_end) {
  const auto n = interval_count(run_end, interval);
  // [interval][class] -> node -> (ok, total)
  std::vector<std::array<std::map<NodeId, std::pair<std::size_t, std::size_t>>, kMessageClassCount>>
      tallies(static_cast<std::size_t>(n));
  for (const auto& ex : exchanges) {
    const auto limit = limits[index_of(ex.cls)];
    const auto idx = outcome_interval(ex, limit, interval, run_end);
    if (!idx || *idx >= n) continue;
    auto& t = tallies[static_cast<std::size_t>(*idx)][index_of(ex.cls)][ex.node];
    const auto d = ex.d_it();
    if (d && *d <= limit) ++t.first;
    ++t.second;
  }

  std::vector<IntervalMetrics> out;
  out.reserve(static_cast<std::size_t>(n) * kMessageClassCount);
  for (IntervalIndex i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < kMessageClassCount; ++c) {
      IntervalMetrics m;
      m.interval = i;
      m.cls = static_cast<MessageClass>(c);
      for (const auto& [node, t] : tallies[static_cast<std::size_t>(i)][c]) {
        m.per_node_reliability[node] = static_cast<double>(t.first) / static_cast<double>(t.second);
        m.sample_count += t.second;
      }
      if (!m.per_node_reliability.empty()) {
        const auto r = class_reliability_ci(m.per_node_reliability);
        m.mean = r.mean;
        m.ci_half_width = r.ci_half_width;
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<LegDelay> leg_delays(std::span<const ExchangeRecord> exchanges) {
  std::vector<LegDelay> out;
  auto add = [&](const SimMessage& m) {
    if (auto d = m.comm_delay()) out.push_back({m.cls, *m.sent_at_comm, *d});
  };
  for (const auto& ex : exchanges) {
    add(ex.request);
    if (ex.response) add(*ex.response);
  }
  return out;
}

double percentile_nearest_rank(std::vector<double>& values, double q) {
  if (values.empty()) throw EmptyDistribution();
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

std::vector<DelayStats> delay_series(std::span<const LegDelay> legs, SimTime interval,
                                     SimTime run_end) {
  const auto n = interval_count(run_end, interval);
  std::vector<std::array<std::vector<double>, kMessageClassCount>> buckets(
      static_cast<std::size_t>(n));
  for (const auto& leg : legs) {
    const auto idx = interval_of(leg.sent_at_comm, interval);
    if (idx >= n) continue;
    buckets[static_cast<std::size_t>(idx)][index_of(leg.cls)].push_back(leg.delay.seconds());
  }
  std::vector<DelayStats> out;
  for (IntervalIndex i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < kMessageClassCount; ++c) {
      auto& v = buckets[static_cast<std::size_t>(i)][c];
      DelayStats s;
      s.interval = i;
      s.cls = static_cast<MessageClass>(c);
      s.count = v.size();
      if (!v.empty()) {
        s.mean_s = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        s.p95_s = percentile_nearest_rank(v, 0.95);
      }
      out.push_back(s);
    }
  }
  return out;
}

} // namespace gridfed
