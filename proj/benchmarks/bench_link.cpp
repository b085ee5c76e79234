#include <benchmark/benchmark.h>

#include "gridfed/link.hpp"

namespace {

using namespace gridfed;

template <typename Queue>
void churn(benchmark::State& state, Queue& q) {
  std::uint64_t seq = 0;
  const auto backlog = state.range(0);
  for (std::int64_t i = 0; i < backlog; ++i) {
    q.push({0, 0, 540, FrameDirection::Data,
            i % 2 ? MessageClass::Control : MessageClass::Monitoring, seq++});
  }
  for (auto _ : state) {
    auto f = q.pop();
    f.seq = seq++;
    q.push(f);
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_WfqDequeue(benchmark::State& state) {
  WfqQueue q({0.1, 0.9});
  churn(state, q);
}
BENCHMARK(BM_WfqDequeue)->Arg(2)->Arg(64)->Arg(4096);

void BM_FifoDequeue(benchmark::State& state) {
  FifoQueue q;
  churn(state, q);
}
BENCHMARK(BM_FifoDequeue)->Arg(2)->Arg(64)->Arg(4096);

void BM_SegmentMessage(benchmark::State& state) {
  SimMessage m;
  m.id = 1;
  m.payload_bytes = static_cast<std::uint32_t>(state.range(0));
  const TransportParams tp;
  std::uint64_t seq = 0;
  for (auto _ : state) benchmark::DoNotOptimize(segment_message(m, tp, seq));
}
BENCHMARK(BM_SegmentMessage)->Arg(64)->Arg(5000);

} // namespace
