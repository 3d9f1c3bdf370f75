#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "mgrid/common.hpp"
#include "mgrid/data/dataset.hpp"
#include "mgrid/forecast/forecast.hpp"

using namespace mgrid;
using forecast::Target;

namespace {

const data::Generators kGen{};

std::vector<env::ExogenousRecord> series(std::size_t hours, auto demand_of) {
  std::vector<env::ExogenousRecord> out;
  const auto start = data::default_start_hour();
  for (std::size_t i = 0; i < hours; ++i)
    out.push_back(data::make_record(start + static_cast<std::int64_t>(i), demand_of(i), 40.0, 6.0, 0.0, kGen));
  return out;
}

forecast::ForecastConfig quick(std::size_t epochs = 80) {
  forecast::ForecastConfig c;
  c.epochs = epochs;
  return c;
}

/// RMSE in physical units of the one-step predictions made at hours [from, to).
double holdout_rmse(const forecast::ForecastModel& m, const std::vector<env::ExogenousRecord>& recs,
                    std::size_t from, std::size_t to, Target t) {
  double acc = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    const double e = forecast::predict(m, recs, i).get(t) - forecast::target_value(recs[i + 1], t);
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(to - from));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i] / n, mb += b[i] / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::string serialise(const forecast::ForecastModel& m) {
  std::ostringstream os;
  forecast::save_forecaster(os, m);
  return os.str();
}

}  // namespace

TEST_CASE("features describe the predicted hour and lag the target") {
  const auto recs = series(200, [](std::size_t i) { return 1.0 + 0.01 * static_cast<double>(i); });
  const auto f = forecast::raw_features(recs, 10, Target::Demand);
  const double tau = 2.0 * std::numbers::pi;
  const int next = (recs[10].hour_of_day + 1) % 24;
  CHECK(f[2] == doctest::Approx(std::sin(tau * next / 24.0)));
  CHECK(f[3] == doctest::Approx(std::cos(tau * next / 24.0)));
  CHECK(f[6] == doctest::Approx(1.10));
  CHECK(f[7] == doctest::Approx(1.09));
  CHECK(f[8] == doctest::Approx(1.08));
  const auto first = forecast::raw_features(recs, 0, Target::Demand);
  CHECK(first[7] == first[6]);
  CHECK(first[8] == first[6]);
}

TEST_CASE("a constant target is reproduced exactly") {
  const auto recs = series(336, [](std::size_t) { return 2.5; });
  const auto m = forecast::train_forecasters(recs, 336, quick(20), {});
  for (std::size_t t : {0u, 100u, 334u}) CHECK(std::abs(forecast::predict(m, recs, t).demand - 2.5) < 1e-3);
}

TEST_CASE("a calendar sinusoid is learned to within a tenth of its amplitude") {
  const double amp = 1.0;
  const auto recs = series(4 * 168, [&](std::size_t i) {
    return 3.0 + amp * std::sin(2.0 * std::numbers::pi * static_cast<double>((i + 5) % 24) / 24.0);
  });
  const std::size_t split = 3 * 168;
  const auto m = forecast::train_forecasters(recs, split, quick(150), {});
  CHECK(holdout_rmse(m, recs, split, recs.size() - 1, Target::Demand) < 0.1 * amp);
}

TEST_CASE("shuffled labels leave only the target variance") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(3.0, 0.5);
  std::vector<double> values(4 * 168);
  for (auto& v : values) v = std::max(0.0, noise(rng));
  std::shuffle(values.begin(), values.end(), rng);
  const auto recs = series(values.size(), [&](std::size_t i) { return values[i]; });
  const std::size_t split = 3 * 168;
  forecast::TrainingReport report;
  const auto m = forecast::train_forecasters(recs, split, quick(40), {}, &report);

  double mean = 0.0, var = 0.0;
  for (std::size_t i = split + 1; i < values.size(); ++i) mean += values[i];
  mean /= static_cast<double>(values.size() - split - 1);
  for (std::size_t i = split + 1; i < values.size(); ++i) var += (values[i] - mean) * (values[i] - mean);
  const double sd = std::sqrt(var / static_cast<double>(values.size() - split - 1));
  const double err = holdout_rmse(m, recs, split, values.size() - 1, Target::Demand);
  CHECK(err > 0.9 * sd);
  CHECK(err < 1.4 * sd);
  CHECK(report.validation_rmse[0] > 0.0);
}

TEST_CASE("predictions respect physical bounds and are deterministic") {
  data::SynthConfig sc;
  sc.weeks = 2;
  auto recs = data::synth_generate(sc, kGen);
  const forecast::ForecastBounds bounds{.wt_capacity = 2.0, .pv_capacity = 5.0};
  const auto m = forecast::train_forecasters(recs, 168, quick(20), bounds);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> wild(-1e4, 1e4);
  for (int k = 0; k < 200; ++k) {
    auto adv = recs;
    for (std::size_t j = 170; j < 175; ++j) {
      adv[j].demand = wild(rng);
      adv[j].wholesale_price = wild(rng);
      adv[j].wind_speed = wild(rng);
      adv[j].irradiance = wild(rng);
      adv[j].wt_output = wild(rng);
      adv[j].pv_output = wild(rng);
    }
    const auto f = forecast::predict(m, adv, 174);
    CHECK(f.demand >= 0.0);
    CHECK(f.price >= 0.0);
    CHECK(f.wt >= 0.0);
    CHECK(f.wt <= 2.0);
    CHECK(f.pv >= 0.0);
    CHECK(f.pv <= 5.0);
  }
  CHECK(forecast::predict(m, recs, 200) == forecast::predict(m, recs, 200));
  const auto again = forecast::train_forecasters(recs, 168, quick(20), bounds);
  CHECK(serialise(again) == serialise(m));
}

TEST_CASE("forecasts track realised next-hour values on synthetic data") {
  data::SynthConfig sc;
  sc.weeks = 8;
  const auto recs = data::synth_generate(sc, kGen);
  const std::size_t split = 6 * 168;
  const auto m = forecast::train_forecasters(recs, split, forecast::ForecastConfig{}, {});
  for (Target t : forecast::kTargets) {
    std::vector<double> pred, real;
    for (std::size_t i = split; i + 1 < recs.size(); ++i) {
      pred.push_back(forecast::predict(m, recs, i).get(t));
      real.push_back(forecast::target_value(recs[i + 1], t));
    }
    INFO(forecast::to_string(t));
    CHECK(pearson(pred, real) > 0.8);
  }
}

TEST_CASE("training never reads records past the split") {
  data::SynthConfig sc;
  sc.weeks = 3;
  const auto recs = data::synth_generate(sc, kGen);
  const std::size_t split = 2 * 168;
  auto poisoned = recs;
  for (std::size_t i = split; i < poisoned.size(); ++i) {
    poisoned[i].demand = std::numeric_limits<double>::quiet_NaN();
    poisoned[i].wholesale_price = 1e9;
    poisoned[i].wt_output = -1.0;
  }
  const auto clean = forecast::train_forecasters(recs, split, quick(10), {});
  const auto dirty = forecast::train_forecasters(poisoned, split, quick(10), {});
  CHECK(clean.trained_on == split);
  CHECK(clean.trained_on <= recs.size());
  CHECK(serialise(clean) == serialise(dirty));

  CHECK_THROWS(forecast::train_forecasters(recs, recs.size() + 1, quick(1), {}));
  CHECK_THROWS(forecast::train_forecasters(recs, 100, quick(1), {}));
}

TEST_CASE("forecasters round-trip through save and load") {
  data::SynthConfig sc;
  sc.weeks = 2;
  const auto recs = data::synth_generate(sc, kGen);
  const auto m = forecast::train_forecasters(recs, 168, quick(5), {});
  std::istringstream in(serialise(m));
  const auto back = forecast::load_forecaster(in);
  CHECK(back.trained_on == m.trained_on);
  for (std::size_t t : {0u, 50u, 300u}) CHECK(forecast::predict(back, recs, t) == forecast::predict(m, recs, t));
}
