#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "mgrid/common.hpp"
#include "mgrid/data/dataset.hpp"

using namespace mgrid;
using data::Generators;

namespace {

std::string csv_rows(std::int64_t start, int hours) {
  std::string s = std::string(data::kCsvHeader) + "\n";
  for (int i = 0; i < hours; ++i)
    s += data::format_timestamp(start + i) + ",2.5,40,7,300\n";
  return s;
}

DataError load_error(const std::string& text) {
  std::istringstream in(text);
  try {
    data::load_csv(in, Generators{});
  } catch (const DataError& e) {
    return e;
  }
  FAIL("expected a DataError");
  return DataError(DataError::Kind::Io, 0, "");
}

double autocorrelation(const std::vector<double>& x, std::size_t lag) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - mean) * (x[i] - mean);
    if (i + lag < x.size()) num += (x[i] - mean) * (x[i + lag] - mean);
  }
  return num / den;
}

}  // namespace

TEST_CASE("timestamps format and parse hour-aligned ISO strings") {
  const auto h = data::default_start_hour();
  CHECK(data::format_timestamp(h) == "2014-01-01T00:00:00");
  CHECK(data::parse_timestamp("2014-01-01T00:00:00") == h);
  CHECK(data::parse_timestamp("2014-01-01T05:00:00") == h + 5);
  CHECK_FALSE(data::parse_timestamp("2014-01-01T05:30:00").has_value());
  CHECK_FALSE(data::parse_timestamp("yesterday").has_value());
  for (std::int64_t k : {0, 1, 23, 24 * 59, 24 * 366 + 7}) CHECK(data::parse_timestamp(data::format_timestamp(h + k)) == h + k);
}

TEST_CASE("records carry the calendar and derived generation") {
  // 2014-01-06 was a Monday.
  const auto monday = *data::parse_timestamp("2014-01-06T00:00:00");
  const Generators gen;
  auto r = data::make_record(monday + 13, 2.0, 50.0, 0.0, 0.0, gen);
  CHECK(r.hour_of_day == 13);
  CHECK(r.hour_of_week == 13);
  CHECK(r.wt_output == 0.0);
  CHECK(r.pv_output == 0.0);
  auto mid = data::make_record(monday + 24 * 2 + 5, 2.0, 50.0, 12.0, 1000.0, gen);
  CHECK(mid.hour_of_week == 53);
  CHECK(mid.wt_output > 0.0);
  CHECK(mid.pv_output == doctest::Approx(gen.solar.rated_power));
}

TEST_CASE("a week of rows loads and round-trips through write_csv") {
  const Generators gen;
  std::istringstream in(csv_rows(data::default_start_hour(), 168));
  const auto recs = data::load_csv(in, gen);
  REQUIRE(recs.size() == 168);
  CHECK(recs.front().demand == 2.5);
  CHECK(recs.back().timestamp == data::default_start_hour() + 167);

  const auto synth = data::synth_generate({.seed = 3, .weeks = 1}, gen);
  std::ostringstream out;
  data::write_csv(out, synth);
  std::istringstream back(out.str());
  const auto again = data::load_csv(back, gen);
  REQUIRE(again.size() == synth.size());
  for (std::size_t i = 0; i < synth.size(); ++i) {
    CHECK(again[i].timestamp == synth[i].timestamp);
    CHECK(again[i].demand == synth[i].demand);
    CHECK(again[i].wholesale_price == synth[i].wholesale_price);
    CHECK(again[i].wind_speed == synth[i].wind_speed);
    CHECK(again[i].irradiance == synth[i].irradiance);
  }
}

TEST_CASE("CSV problems are reported with their kind and line") {
  using K = DataError::Kind;
  CHECK(load_error("").kind() == K::Schema);
  CHECK(load_error(std::string(data::kCsvHeader) + "\n").kind() == K::Schema);
  CHECK(load_error("time,demand\n2014-01-01T00:00:00,1\n").kind() == K::Schema);

  const auto h = data::default_start_hour();
  std::string dup = csv_rows(h, 3) + data::format_timestamp(h + 2) + ",2.5,40,7,300\n";
  auto e = load_error(dup);
  CHECK(e.kind() == K::NonMonotone);
  CHECK(e.line() == 5);

  std::string gap = csv_rows(h, 2) + data::format_timestamp(h + 3) + ",2.5,40,7,300\n";
  e = load_error(gap);
  CHECK(e.kind() == K::Gap);
  CHECK(e.line() == 4);

  e = load_error(csv_rows(h, 1) + data::format_timestamp(h + 1) + ",2.5,abc,7,300\n");
  CHECK(e.kind() == K::Malformed);
  CHECK(e.line() == 3);
  CHECK(load_error(csv_rows(h, 1) + data::format_timestamp(h + 1) + ",2.5,40\n").kind() == K::Malformed);
  CHECK(load_error(csv_rows(h, 1) + "not-a-time,2.5,40,7,300\n").kind() == K::Malformed);
  CHECK(load_error(csv_rows(h, 1) + data::format_timestamp(h + 1) + ",-1,40,7,300\n").kind() == K::Malformed);

  try {
    data::load_csv(std::filesystem::path("/nonexistent/file.csv"), Generators{});
    FAIL("expected failure");
  } catch (const DataError& err) {
    CHECK(err.kind() == K::Io);
  }
}

TEST_CASE("synthetic series are seeded, bounded and periodic") {
  const Generators gen;
  data::SynthConfig cfg;
  cfg.weeks = 8;
  const auto a = data::synth_generate(cfg, gen);
  const auto b = data::synth_generate(cfg, gen);
  CHECK(a == b);
  cfg.seed = 2;
  CHECK_FALSE(data::synth_generate(cfg, gen) == a);
  REQUIRE(a.size() == 8u * 168u);

  std::vector<double> demand;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& r = a[i];
    CHECK(r.timestamp == cfg.start_hour + static_cast<std::int64_t>(i));
    CHECK(r.wholesale_price >= 0.0);
    CHECK(r.wholesale_price <= cfg.price_max);
    CHECK(r.demand > 0.0);
    CHECK(r.wind_speed >= 0.0);
    if (r.hour_of_day <= 6 || r.hour_of_day >= 18) CHECK(r.irradiance == 0.0);
    demand.push_back(r.demand);
  }
  CHECK(autocorrelation(demand, 24) > autocorrelation(demand, 13));
  CHECK(autocorrelation(demand, 168) > 0.5);
}

TEST_CASE("synthetic configuration is validated") {
  data::SynthConfig cfg;
  cfg.weeks = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.demand_daily_amplitude = cfg.demand_base;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.wind_persistence = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.price_spike_probability = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_NOTHROW(data::SynthConfig{}.validate());
}
