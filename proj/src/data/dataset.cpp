#include "mgrid/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "mgrid/common.hpp"

namespace mgrid::data {

namespace chr = std::chrono;

std::int64_t default_start_hour() {
  const chr::sys_days day = chr::year{2014} / chr::January / 1;
  return chr::duration_cast<chr::hours>(day.time_since_epoch()).count();
}

std::string format_timestamp(std::int64_t hour) {
  const chr::sys_time<chr::hours> tp{chr::hours{hour}};
  const auto day = chr::floor<chr::days>(tp);
  const chr::year_month_day ymd{day};
  const auto h = (tp - day).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:00:00", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(h));
  return buf;
}

std::optional<std::int64_t> parse_timestamp(const std::string& s) {
  // YYYY-MM-DDTHH:MM:SS with zero minutes and seconds
  if (s.size() != 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
      s[16] != ':')
    return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len, int& out) {
    const char* b = s.data() + pos;
    auto [p, ec] = std::from_chars(b, b + len, out);
    return ec == std::errc() && p == b + len;
  };
  int y, mo, d, h, mi, se;
  if (!num(0, 4, y) || !num(5, 2, mo) || !num(8, 2, d) || !num(11, 2, h) || !num(14, 2, mi) ||
      !num(17, 2, se))
    return std::nullopt;
  if (h > 23 || mi != 0 || se != 0) return std::nullopt;
  const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(mo)},
                                chr::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  const chr::sys_days day{ymd};
  return chr::duration_cast<chr::hours>(day.time_since_epoch()).count() + h;
}

env::ExogenousRecord make_record(std::int64_t hour, double demand, double price, double wind_speed,
                                 double irradiance, const Generators& gen) {
  env::ExogenousRecord r;
  r.timestamp = hour;
  const chr::sys_time<chr::hours> tp{chr::hours{hour}};
  const auto day = chr::floor<chr::days>(tp);
  r.hour_of_day = static_cast<int>((tp - day).count());
  const unsigned iso = chr::weekday{day}.iso_encoding();  // Monday = 1
  r.hour_of_week = static_cast<int>(iso - 1) * 24 + r.hour_of_day;
  r.demand = demand;
  r.wholesale_price = price;
  r.wind_speed = wind_speed;
  r.irradiance = irradiance;
  r.wt_output = env::wind_farm_power(wind_speed, gen.wind);
  r.pv_output = env::pv_power(irradiance, gen.solar);
  return r;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* b = t.data();
  auto [p, ec] = std::from_chars(b, b + t.size(), out);
  return ec == std::errc() && p == b + t.size() && std::isfinite(out);
}

}  // namespace

std::vector<env::ExogenousRecord> load_csv(std::istream& in, const Generators& gen) {
  using K = DataError::Kind;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line) == "\r") continue;
    have_header = true;
    break;
  }
  if (!have_header) throw DataError(K::Schema, 0, "dataset is empty: expected header '" + std::string(kCsvHeader) + "'");
  {
    auto fields = split_fields(line);
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i) joined += (i ? "," : "") + trim(fields[i]);
    if (!joined.empty() && static_cast<unsigned char>(joined[0]) == 0xEF && joined.size() >= 3)
      joined = joined.substr(3);  // UTF-8 byte order mark
    if (joined != kCsvHeader)
      throw DataError(K::Schema, lineno,
                      "line " + std::to_string(lineno) + ": header must be '" + std::string(kCsvHeader) +
                          "', found '" + joined + "'");
  }

  std::vector<env::ExogenousRecord> records;
  static const char* names[] = {"timestamp", "demand_mwh", "price_per_mwh", "wind_speed_ms", "irradiance_wm2"};
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (f.size() != 5)
      throw DataError(K::Malformed, lineno, where + "expected 5 fields, found " + std::to_string(f.size()));
    const auto ts = parse_timestamp(trim(f[0]));
    if (!ts) throw DataError(K::Malformed, lineno, where + "invalid timestamp '" + trim(f[0]) + "'");
    double v[4];
    for (int k = 0; k < 4; ++k) {
      if (!parse_double(f[static_cast<std::size_t>(k + 1)], v[k]))
        throw DataError(K::Malformed, lineno, where + "field " + names[k + 1] + " is not a finite number");
      if (v[k] < 0.0) throw DataError(K::Malformed, lineno, where + "field " + names[k + 1] + " is negative");
    }
    if (!records.empty()) {
      const std::int64_t prev = records.back().timestamp;
      if (*ts <= prev)
        throw DataError(K::NonMonotone, lineno,
                        where + "timestamp " + trim(f[0]) + " does not follow " + format_timestamp(prev));
      if (*ts != prev + 1)
        throw DataError(K::Gap, lineno,
                        where + "gap of " + std::to_string(*ts - prev - 1) + " hour(s) after " +
                            format_timestamp(prev));
    }
    records.push_back(make_record(*ts, v[0], v[1], v[2], v[3], gen));
  }
  if (records.empty()) throw DataError(K::Schema, lineno, "dataset has a header but no rows");
  return records;
}

std::vector<env::ExogenousRecord> load_csv(const std::filesystem::path& path, const Generators& gen) {
  std::ifstream in(path);
  if (!in) throw DataError(DataError::Kind::Io, 0, "cannot open dataset '" + path.string() + "'");
  return load_csv(in, gen);
}

void write_csv(std::ostream& out, const std::vector<env::ExogenousRecord>& records) {
  out << kCsvHeader << '\n';
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g\n", format_timestamp(r.timestamp).c_str(),
                  r.demand, r.wholesale_price, r.wind_speed, r.irradiance);
    out << buf;
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<env::ExogenousRecord>& records) {
  std::ofstream out(path);
  if (!out) throw DataError(DataError::Kind::Io, 0, "cannot write '" + path.string() + "'");
  write_csv(out, records);
  if (!out) throw DataError(DataError::Kind::Io, 0, "write failed for '" + path.string() + "'");
}

void SynthConfig::validate() const {
  if (weeks <= 0) throw ConfigError("synth: weeks must be positive");
  if (!(demand_base > 0.0)) throw ConfigError("synth: demand_base must be positive");
  if (!(demand_daily_amplitude >= 0.0 && demand_daily_amplitude < demand_base))
    throw ConfigError("synth: demand_daily_amplitude must lie in [0, demand_base)");
  if (!(demand_weekend_factor > 0.0)) throw ConfigError("synth: demand_weekend_factor must be positive");
  if (!(demand_noise_std >= 0.0 && price_noise_std >= 0.0 && wind_noise_std >= 0.0 && cloud_noise_std >= 0.0))
    throw ConfigError("synth: noise levels must be non-negative");
  if (!(price_spike_probability >= 0.0 && price_spike_probability <= 1.0))
    throw ConfigError("synth: price_spike_probability must lie in [0, 1]");
  if (!(price_max > 0.0)) throw ConfigError("synth: price_max must be positive");
  if (!(wind_persistence >= 0.0 && wind_persistence < 1.0 && cloud_persistence >= 0.0 && cloud_persistence < 1.0))
    throw ConfigError("synth: persistence must lie in [0, 1)");
  if (!(wind_mean >= 0.0 && solar_peak >= 0.0)) throw ConfigError("synth: wind_mean and solar_peak must be non-negative");
  if (!(cloud_mean >= 0.0 && cloud_mean <= 1.0)) throw ConfigError("synth: cloud_mean must lie in [0, 1]");
}

std::vector<env::ExogenousRecord> synth_generate(const SynthConfig& cfg, const Generators& gen) {
  cfg.validate();
  Rng demand_rng(derive_seed(cfg.seed, "synth-demand"));
  Rng price_rng(derive_seed(cfg.seed, "synth-price"));
  Rng wind_rng(derive_seed(cfg.seed, "synth-wind"));
  Rng cloud_rng(derive_seed(cfg.seed, "synth-cloud"));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double tau = 2.0 * std::numbers::pi;

  const std::size_t hours = static_cast<std::size_t>(cfg.weeks) * kHoursPerEpisode;
  std::vector<env::ExogenousRecord> out;
  out.reserve(hours);
  double wind = cfg.wind_mean;
  double cloud = cfg.cloud_mean;
  for (std::size_t i = 0; i < hours; ++i) {
    const std::int64_t hour = cfg.start_hour + static_cast<std::int64_t>(i);
    const auto probe = make_record(hour, 0, 0, 0, 0, gen);
    const int hod = probe.hour_of_day;
    const bool weekend = probe.hour_of_week >= 5 * 24;

    // two daily humps: morning ramp and an evening peak
    const double daily = 0.6 * std::sin(tau * (hod - 6) / 24.0) + 0.4 * std::sin(2.0 * tau * (hod - 3) / 24.0);
    double demand = cfg.demand_base + cfg.demand_daily_amplitude * daily;
    if (weekend) demand *= cfg.demand_weekend_factor;
    demand = std::max(0.05 * cfg.demand_base, demand + cfg.demand_noise_std * unit(demand_rng));

    double price = cfg.price_base + cfg.price_demand_coupling * (demand - cfg.demand_base) +
                   cfg.price_noise_std * unit(price_rng);
    if (uni(price_rng) < cfg.price_spike_probability) price += cfg.price_spike_size;
    price = std::clamp(price, 0.0, cfg.price_max);

    wind = cfg.wind_mean + cfg.wind_persistence * (wind - cfg.wind_mean) + cfg.wind_noise_std * unit(wind_rng);
    wind = std::max(0.0, wind);

    cloud = cfg.cloud_mean + cfg.cloud_persistence * (cloud - cfg.cloud_mean) + cfg.cloud_noise_std * unit(cloud_rng);
    cloud = std::clamp(cloud, 0.0, 1.0);
    const double elevation = std::sin(tau * (hod - 6) / 24.0);  // zero at 06:00 and 18:00
    const double irradiance = hod > 6 && hod < 18 ? cfg.solar_peak * elevation * cloud : 0.0;

    out.push_back(make_record(hour, demand, price, wind, std::max(0.0, irradiance), gen));
  }
  return out;
}

}  // namespace mgrid::data
