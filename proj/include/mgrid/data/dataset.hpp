#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mgrid/env/generation.hpp"
#include "mgrid/env/record.hpp"

namespace mgrid::data {

inline constexpr const char* kCsvHeader = "timestamp,demand_mwh,price_per_mwh,wind_speed_ms,irradiance_wm2";

/// Hours since the Unix epoch for 2014-01-01T00:00.
std::int64_t default_start_hour();

/// "YYYY-MM-DDTHH:00:00" for an hour index, and its inverse. Parsing returns
/// nothing for strings that are not hour-aligned ISO timestamps.
std::string format_timestamp(std::int64_t hour);
std::optional<std::int64_t> parse_timestamp(const std::string& text);

struct Generators {
  env::WindTurbineSpec wind;
  env::SolarFarmSpec solar;
};

/// Fills the calendar fields and derived WT / PV output.
env::ExogenousRecord make_record(std::int64_t hour, double demand, double price, double wind_speed,
                                 double irradiance, const Generators& gen);

/// Parses and validates a dataset. Throws DataError with a distinct kind for
/// schema problems, malformed rows, gaps and non-monotone timestamps.
std::vector<env::ExogenousRecord> load_csv(std::istream& in, const Generators& gen);
std::vector<env::ExogenousRecord> load_csv(const std::filesystem::path& path, const Generators& gen);

void write_csv(std::ostream& out, const std::vector<env::ExogenousRecord>& records);
void write_csv(const std::filesystem::path& path, const std::vector<env::ExogenousRecord>& records);

struct SynthConfig {
  std::uint64_t seed = 1;
  int weeks = 40;
  std::int64_t start_hour = default_start_hour();

  double demand_base = 2.5;
  double demand_daily_amplitude = 1.0;
  double demand_weekend_factor = 0.8;  // multiplier on Saturday and Sunday
  double demand_noise_std = 0.08;

  double price_base = 40.0;
  double price_demand_coupling = 18.0;  // currency per MWh of demand above base
  double price_noise_std = 4.0;
  double price_spike_probability = 0.01;
  double price_spike_size = 30.0;
  double price_max = 288.0;

  double wind_mean = 7.0;
  double wind_persistence = 0.92;
  double wind_noise_std = 1.0;

  double solar_peak = 950.0;  // clear-sky irradiance at noon
  double cloud_mean = 0.75;
  double cloud_persistence = 0.85;
  double cloud_noise_std = 0.12;

  void validate() const;
};

/// Seeded synthetic hourly series with daily and weekly demand cycles, a
/// demand-coupled price, AR(1) wind and a clear-sky solar profile under an
/// AR(1) cloud factor.
std::vector<env::ExogenousRecord> synth_generate(const SynthConfig& cfg, const Generators& gen);

}  // namespace mgrid::data
