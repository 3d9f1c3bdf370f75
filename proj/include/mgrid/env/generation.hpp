#pragma once

namespace mgrid::env {

struct WindTurbineSpec {
  double cut_in_speed = 3.0;    // m/s
  double rated_speed = 12.0;    // m/s
  double cut_out_speed = 25.0;  // m/s
  double blade_radius = 30.0;   // m
  double power_coefficient = 0.4;
  double rated_power = 1.0;     // MW per turbine
  double air_density = 1.225;   // kg/m^3
  int turbine_count = 2;

  void validate() const;
  double farm_capacity() const { return rated_power * turbine_count; }
};

struct SolarFarmSpec {
  double rated_power = 5.0;             // MW
  double reference_irradiance = 1000.0;  // W/m^2

  void validate() const;
};

/// Power curve of a single turbine in MW. The aerodynamic region is capped at
/// the rated power so the curve stays monotone up to the cut-out speed.
double wind_power(double wind_speed, const WindTurbineSpec& spec);

/// Whole-farm wind output in MW.
double wind_farm_power(double wind_speed, const WindTurbineSpec& spec);

double pv_power(double irradiance, const SolarFarmSpec& spec);

}  // namespace mgrid::env
