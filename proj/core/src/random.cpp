#include "gridfed/random.hpp"

#include <cmath>
#include <limits>

namespace gridfed {

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased for any n.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::exponential(double rate) {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform01()) / rate;
}

} // namespace gridfed
