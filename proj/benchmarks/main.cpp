#include <benchmark/benchmark.h>

// The packaged benchmark_main archive carries LTO objects from another
// compiler release, so the entry point is provided here.
BENCHMARK_MAIN();
