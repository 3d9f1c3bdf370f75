#include "mgrid/env/generation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mgrid/common.hpp"

namespace mgrid::env {

void WindTurbineSpec::validate() const {
  if (!(0.0 < cut_in_speed && cut_in_speed < rated_speed && rated_speed < cut_out_speed))
    throw ConfigError("wind turbine: require 0 < cut_in < rated < cut_out");
  if (!(power_coefficient > 0.0 && power_coefficient < 0.593))
    throw ConfigError("wind turbine: power coefficient must lie in (0, 0.593)");
  if (!(rated_power > 0.0)) throw ConfigError("wind turbine: rated_power must be positive");
  if (!(blade_radius > 0.0 && air_density > 0.0))
    throw ConfigError("wind turbine: blade radius and air density must be positive");
  if (turbine_count < 0) throw ConfigError("wind turbine: negative turbine count");
}

void SolarFarmSpec::validate() const {
  if (!(rated_power > 0.0)) throw ConfigError("solar farm: rated_power must be positive");
  if (!(reference_irradiance > 0.0))
    throw ConfigError("solar farm: reference_irradiance must be positive");
}

double wind_power(double v, const WindTurbineSpec& spec) {
  if (v < spec.cut_in_speed || v > spec.cut_out_speed) return 0.0;
  if (v >= spec.rated_speed) return spec.rated_power;
  const double r = spec.blade_radius;
  const double watts =
      0.5 * spec.air_density * std::numbers::pi * r * r * spec.power_coefficient * v * v * v;
  return std::min(watts * 1e-6, spec.rated_power);
}

double wind_farm_power(double v, const WindTurbineSpec& spec) {
  return wind_power(v, spec) * spec.turbine_count;
}

double pv_power(double irradiance, const SolarFarmSpec& spec) {
  if (irradiance <= 0.0) return 0.0;
  return spec.rated_power * std::min(irradiance / spec.reference_irradiance, 1.0);
}

}  // namespace mgrid::env
