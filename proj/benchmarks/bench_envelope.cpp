#include <benchmark/benchmark.h>

#include "gridfed/envelope.hpp"

namespace {

using namespace gridfed;

FederateEnvelope sample_deliver() {
  SimMessage m;
  m.id = 123456;
  m.cls = MessageClass::Monitoring;
  m.src = 3;
  m.dst = 200;
  m.payload_bytes = 500;
  m.kind = MessageKind::Response;
  m.created_at_it = SimTime::from_ticks(50'000'000);
  m.sent_at_comm = SimTime::from_ticks(50'000'000);
  m.delivered_at_comm = SimTime::from_ticks(50'010'640);
  m.correlation_id = 123400;
  return FederateEnvelope::deliver(5001, {m, SimTime::from_ticks(50'011'000)});
}

void BM_EncodeDeliver(benchmark::State& state) {
  const auto env = sample_deliver();
  for (auto _ : state) benchmark::DoNotOptimize(encode_envelope(env));
}
BENCHMARK(BM_EncodeDeliver);

void BM_DecodeDeliver(benchmark::State& state) {
  const auto frame = encode_envelope(sample_deliver());
  for (auto _ : state) benchmark::DoNotOptimize(decode_envelope(frame));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * frame.size()));
}
BENCHMARK(BM_DecodeDeliver);

void BM_DecodeGrant(benchmark::State& state) {
  const auto frame = encode_envelope(FederateEnvelope::grant({5, SimTime::from_ticks(600000)}));
  for (auto _ : state) benchmark::DoNotOptimize(decode_envelope(frame));
}
BENCHMARK(BM_DecodeGrant);

} // namespace
