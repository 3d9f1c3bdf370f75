#include "mgrid/forecast/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mgrid/common.hpp"
#include "mgrid/nn/optimizer.hpp"

namespace mgrid::forecast {

using nn::Matrix;
using nn::Vector;

std::string_view to_string(Target t) {
  switch (t) {
    case Target::Demand: return "demand";
    case Target::Price: return "price";
    case Target::Wind: return "wt";
    case Target::Solar: return "pv";
  }
  return "?";
}

double Forecast::get(Target t) const {
  switch (t) {
    case Target::Demand: return demand;
    case Target::Price: return price;
    case Target::Wind: return wt;
    case Target::Solar: return pv;
  }
  return 0.0;
}

void Forecast::set(Target t, double v) {
  switch (t) {
    case Target::Demand: demand = v; break;
    case Target::Price: price = v; break;
    case Target::Wind: wt = v; break;
    case Target::Solar: pv = v; break;
  }
}

double target_value(const env::ExogenousRecord& r, Target t) {
  switch (t) {
    case Target::Demand: return r.demand;
    case Target::Price: return r.wholesale_price;
    case Target::Wind: return r.wt_output;
    case Target::Solar: return r.pv_output;
  }
  return 0.0;
}

void ForecastConfig::validate() const {
  if (hidden_units == 0) throw ConfigError("forecast: hidden_units must be positive");
  if (epochs == 0) throw ConfigError("forecast: epochs must be positive");
  if (batch_size == 0) throw ConfigError("forecast: batch_size must be positive");
  if (!(step_size > 0.0)) throw ConfigError("forecast: step_size must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw ConfigError("forecast: validation_fraction must lie in [0, 1)");
}

std::array<double, kFeatureCount> raw_features(std::span<const env::ExogenousRecord> records,
                                               std::size_t t, Target target) {
  const auto& now = records[t];
  const double tau = 2.0 * std::numbers::pi;
  const int next_day = (now.hour_of_day + 1) % 24;
  const int next_week = (now.hour_of_week + 1) % 168;
  std::array<double, kFeatureCount> f{};
  f[0] = now.wind_speed;
  f[1] = now.irradiance;
  f[2] = std::sin(tau * next_day / 24.0);
  f[3] = std::cos(tau * next_day / 24.0);
  f[4] = std::sin(tau * next_week / 168.0);
  f[5] = std::cos(tau * next_week / 168.0);
  for (std::size_t k = 0; k < kLagCount; ++k) {
    const std::size_t idx = t >= k ? t - k : 0;
    f[6 + k] = target_value(records[idx], target);
  }
  return f;
}

namespace {

Range fit_range(const std::vector<double>& values) {
  Range r;
  if (values.empty()) return r;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  r.lo = *lo;
  r.hi = *hi;
  return r;
}

Vector normalised_features(const TargetModel& m, const std::array<double, kFeatureCount>& raw) {
  Vector x(static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t j = 0; j < kFeatureCount; ++j) x(static_cast<Eigen::Index>(j)) = m.feature_ranges[j].normalise(raw[j]);
  return x;
}

double clamp_target(Target t, double v, const ForecastBounds& b) {
  switch (t) {
    case Target::Demand: return std::max(v, 0.0);
    case Target::Price: return std::max(v, 0.0);
    case Target::Wind: return std::clamp(v, 0.0, b.wt_capacity);
    case Target::Solar: return std::clamp(v, 0.0, b.pv_capacity);
  }
  return v;
}

double rmse(const nn::NetworkParams& net, const Matrix& x, const Vector& y) {
  if (x.cols() == 0) return 0.0;
  const Matrix out = nn::forward(net, x, nullptr);
  return std::sqrt((out.row(0).transpose() - y).squaredNorm() / static_cast<double>(y.size()));
}

}  // namespace

ForecastModel train_forecasters(std::span<const env::ExogenousRecord> records, std::size_t split_end,
                                const ForecastConfig& cfg, const ForecastBounds& bounds,
                                TrainingReport* report) {
  cfg.validate();
  if (split_end > records.size()) throw std::invalid_argument("train_forecasters: split beyond data");
  if (split_end < static_cast<std::size_t>(kHoursPerEpisode))
    throw std::invalid_argument("train_forecasters: at least one week of training records is required");
  const auto visible = records.first(split_end);

  // sample t predicts t + 1; both must lie inside the visible span
  const std::size_t samples = split_end - 1;
  const auto n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * samples));
  const std::size_t n_train = samples - n_val;

  ForecastModel model;
  model.bounds = bounds;
  model.trained_on = split_end;
  Rng rng(cfg.seed);

  for (std::size_t ti = 0; ti < kTargetCount; ++ti) {
    const Target target = kTargets[ti];
    TargetModel& tm = model.models[ti];

    std::vector<std::array<double, kFeatureCount>> raw(samples);
    std::vector<double> y_raw(samples);
    for (std::size_t t = 0; t < samples; ++t) {
      raw[t] = raw_features(visible, t, target);
      y_raw[t] = target_value(visible[t + 1], target);
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      std::vector<double> col(n_train);
      for (std::size_t t = 0; t < n_train; ++t) col[t] = raw[t][j];
      tm.feature_ranges[j] = fit_range(col);
    }
    tm.target_range = fit_range(std::vector<double>(y_raw.begin(), y_raw.begin() + static_cast<std::ptrdiff_t>(n_train)));

    Matrix x(static_cast<Eigen::Index>(kFeatureCount), static_cast<Eigen::Index>(samples));
    Vector y(static_cast<Eigen::Index>(samples));
    for (std::size_t t = 0; t < samples; ++t) {
      x.col(static_cast<Eigen::Index>(t)) = normalised_features(tm, raw[t]);
      y(static_cast<Eigen::Index>(t)) = tm.target_range.normalise(y_raw[t]);
    }
    const Matrix x_train = x.leftCols(static_cast<Eigen::Index>(n_train));
    const Vector y_train = y.head(static_cast<Eigen::Index>(n_train));

    const auto arch = nn::Architecture::mlp(kFeatureCount, {cfg.hidden_units}, 1, nn::Activation::Linear, false);
    nn::Network net(arch, rng);
    nn::Optimizer opt(nn::OptimizerKind::Adam, net.params());

    std::vector<std::size_t> order(n_train);
    for (std::size_t i = 0; i < n_train; ++i) order[i] = i;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
        const std::size_t end = std::min(start + cfg.batch_size, n_train);
        const auto b = static_cast<Eigen::Index>(end - start);
        Matrix xb(x_train.rows(), b);
        Vector yb(b);
        for (Eigen::Index i = 0; i < b; ++i) {
          xb.col(i) = x_train.col(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(i)]));
          yb(i) = y_train(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(i)]));
        }
        nn::ForwardCache cache;
        const Matrix out = net.forward(xb, nn::NoiseMode::Zero, &cache);
        const Matrix upstream = (2.0 / static_cast<double>(b)) * (out.row(0) - yb.transpose());
        const auto grads = net.backward(cache, upstream).gradients;
        (void)opt.apply_update(net.params(), grads, cfg.step_size);
      }
    }
    tm.network = net.params();
    if (report) {
      report->train_rmse[ti] = rmse(tm.network, x_train, y_train);
      report->validation_rmse[ti] =
          rmse(tm.network, x.rightCols(static_cast<Eigen::Index>(n_val)), y.tail(static_cast<Eigen::Index>(n_val)));
    }
  }
  return model;
}

Forecast predict(const ForecastModel& model, std::span<const env::ExogenousRecord> records,
                 std::size_t t) {
  if (t >= records.size()) throw std::out_of_range("predict: hour beyond the series");
  Forecast f;
  for (std::size_t ti = 0; ti < kTargetCount; ++ti) {
    const Target target = kTargets[ti];
    const auto& tm = model.models[ti];
    const Vector x = normalised_features(tm, raw_features(records, t, target));
    const Matrix out = nn::forward(tm.network, x, nullptr);
    f.set(target, clamp_target(target, tm.target_range.denormalise(out(0, 0)), model.bounds));
  }
  return f;
}

std::vector<Forecast> predict_series(const ForecastModel& model,
                                     std::span<const env::ExogenousRecord> records) {
  std::vector<Forecast> out;
  out.reserve(records.size());
  for (std::size_t t = 0; t < records.size(); ++t) out.push_back(predict(model, records, t));
  return out;
}

void save_forecaster(std::ostream& os, const ForecastModel& model) {
  os.precision(17);
  os << "mgrid-forecaster 1\n";
  os << "bounds " << model.bounds.wt_capacity << ' ' << model.bounds.pv_capacity << " trained_on "
     << model.trained_on << '\n';
  for (std::size_t ti = 0; ti < kTargetCount; ++ti) {
    const auto& tm = model.models[ti];
    os << "target " << to_string(kTargets[ti]) << ' ' << tm.target_range.lo << ' ' << tm.target_range.hi << '\n';
    os << "features";
    for (const auto& r : tm.feature_ranges) os << ' ' << r.lo << ' ' << r.hi;
    os << '\n';
    nn::save_network(os, tm.network);
  }
}

ForecastModel load_forecaster(std::istream& is) {
  auto expect = [&](const std::string& word) {
    std::string got;
    if (!(is >> got) || got != word)
      throw std::runtime_error("forecaster checkpoint: expected '" + word + "', found '" + got + "'");
  };
  expect("mgrid-forecaster");
  int version = 0;
  is >> version;
  if (version != 1) throw std::runtime_error("forecaster checkpoint: unsupported version");
  ForecastModel m;
  expect("bounds");
  is >> m.bounds.wt_capacity >> m.bounds.pv_capacity;
  expect("trained_on");
  is >> m.trained_on;
  for (std::size_t ti = 0; ti < kTargetCount; ++ti) {
    expect("target");
    expect(std::string(to_string(kTargets[ti])));
    auto& tm = m.models[ti];
    is >> tm.target_range.lo >> tm.target_range.hi;
    expect("features");
    for (auto& r : tm.feature_ranges) is >> r.lo >> r.hi;
    if (!is) throw std::runtime_error("forecaster checkpoint: truncated header");
    tm.network = nn::load_network(is);
  }
  return m;
}

}  // namespace mgrid::forecast
