#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace easysched {

// Simulated time is kept in whole seconds and energy in tenths of a
// watt-hour so that schedule arithmetic replays bit-exactly.
using Seconds = std::int64_t;
using DeciWh = std::int64_t;

inline double to_wh(DeciWh e) { return static_cast<double>(e) / 10.0; }
inline DeciWh from_wh(double wh) {
  return static_cast<DeciWh>(wh * 10.0 + (wh >= 0 ? 0.5 : -0.5));
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace easysched
