#pragma once

#include <cstdint>

namespace mgrid::env {

/// One hour of exogenous inputs plus the renewable output derived from them.
struct ExogenousRecord {
  std::int64_t timestamp = 0;  // hours since 1970-01-01T00:00 UTC
  int hour_of_day = 0;         // 0-23
  int hour_of_week = 0;        // 0-167, Monday 00:00 = 0
  double demand = 0.0;         // MWh
  double wholesale_price = 0.0;
  double wind_speed = 0.0;     // m/s
  double irradiance = 0.0;     // W/m^2
  double wt_output = 0.0;      // MWh
  double pv_output = 0.0;      // MWh

  bool operator==(const ExogenousRecord&) const = default;
};

}  // namespace mgrid::env
