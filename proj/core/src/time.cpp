#include "gridfed/time.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gridfed/errors.hpp"

namespace gridfed {

SimTime SimTime::from_seconds(double seconds, std::string_view key) {
  if (!std::isfinite(seconds)) {
    throw ValidationError(std::string(key), "not a finite number");
  }
  const double scaled = seconds * static_cast<double>(kTicksPerSecond);
  if (std::fabs(scaled) > static_cast<double>(std::numeric_limits<Tick>::max() / 2)) {
    throw ValidationError(std::string(key), "out of range");
  }
  const double rounded = std::nearbyint(scaled);
  // Decimal inputs such as 0.01 are not exact in binary; accept anything
  // within a relative 1e-9 of a whole tick.
  if (std::fabs(scaled - rounded) > 1e-9 * std::max(1.0, std::fabs(rounded))) {
    throw ValidationError(std::string(key), "not a multiple of the 1e-5 s base unit");
  }
  return SimTime(static_cast<Tick>(rounded));
}

} // namespace gridfed
