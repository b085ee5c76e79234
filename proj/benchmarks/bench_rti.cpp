#include <benchmark/benchmark.h>

#include "gridfed/it_federate.hpp"
#include "gridfed/net_federate.hpp"
#include "gridfed/rti.hpp"

namespace {

using namespace gridfed;

class Idle final : public Federate {
 public:
  StepResult step(const Grant&, std::span<const Delivery>) override { return {}; }
};

// Bare synchronization cost: two federates with nothing to do.
void BM_EmptySlot(benchmark::State& state) {
  Idle a, b;
  Rti rti(SimTime::from_ticks(1000));
  rti.register_federate("a", std::make_unique<InProcessEndpoint>(a));
  rti.register_federate("b", std::make_unique<InProcessEndpoint>(b));
  for (auto _ : state) benchmark::DoNotOptimize(rti.advance_slot());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EmptySlot);

// Full case study for a given simulated span; reports simulated seconds per
// wallclock second.
void BM_CaseStudy(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.duration_s = static_cast<double>(state.range(0));
  cfg.qos = QosMode::WfqRa;
  cfg.lte_fail_at_s = cfg.duration_s / 2;
  const Topology topo(generate_topology(cfg, cfg.seed));
  for (auto _ : state) {
    ItFederate it(cfg, topo);
    NetFederate net(cfg, topo);
    Rti rti(cfg.tau());
    rti.register_federate("it", std::make_unique<InProcessEndpoint>(it));
    rti.register_federate("net", std::make_unique<InProcessEndpoint>(net));
    benchmark::DoNotOptimize(rti.run(cfg.duration()));
  }
  state.counters["sim_s_per_s"] = benchmark::Counter(
      cfg.duration_s * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_CaseStudy)->Arg(200)->Unit(benchmark::kMillisecond);

} // namespace
