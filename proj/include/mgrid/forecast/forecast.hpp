#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "mgrid/env/record.hpp"
#include "mgrid/nn/network.hpp"

namespace mgrid::forecast {

enum class Target { Demand, Price, Wind, Solar };
inline constexpr std::size_t kTargetCount = 4;
inline constexpr std::array<Target, kTargetCount> kTargets{Target::Demand, Target::Price, Target::Wind,
                                                          Target::Solar};
std::string_view to_string(Target t);

/// One-step-ahead prediction of the exogenous quantities.
struct Forecast {
  double demand = 0.0;
  double price = 0.0;
  double wt = 0.0;
  double pv = 0.0;

  double get(Target t) const;
  void set(Target t, double v);
  bool operator==(const Forecast&) const = default;
};

/// Value of a target in a record: demand, wholesale price, WT or PV output.
double target_value(const env::ExogenousRecord& r, Target t);

inline constexpr std::size_t kLagCount = 3;
/// wind speed, irradiance, four calendar terms of the predicted hour, three lags.
inline constexpr std::size_t kFeatureCount = 2 + 4 + kLagCount;

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  double normalise(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
  double denormalise(double u) const { return lo + u * (hi - lo); }
};

struct ForecastConfig {
  std::size_t hidden_units = 64;
  std::size_t epochs = 150;
  std::size_t batch_size = 64;
  double step_size = 3e-3;
  double validation_fraction = 0.2;
  std::uint64_t seed = 7;

  void validate() const;
};

/// Physical output bounds used to clamp predictions.
struct ForecastBounds {
  double wt_capacity = 2.0;
  double pv_capacity = 5.0;
};

struct TargetModel {
  nn::NetworkParams network;
  std::array<Range, kFeatureCount> feature_ranges{};
  Range target_range;
};

struct ForecastModel {
  std::array<TargetModel, kTargetCount> models;
  ForecastBounds bounds;
  std::size_t trained_on = 0;  // records [0, trained_on) were visible during training
};

struct TrainingReport {
  std::array<double, kTargetCount> train_rmse{};       // normalised units
  std::array<double, kTargetCount> validation_rmse{};  // normalised units, held-out tail
};

/// Raw features for predicting hour t + 1 from records up to t. Lags before
/// the start of the series repeat the first record.
std::array<double, kFeatureCount> raw_features(std::span<const env::ExogenousRecord> records,
                                               std::size_t t, Target target);

/// Fits one regression network per target. Only records [0, split_end) are
/// read; the last validation_fraction of those samples is held out.
ForecastModel train_forecasters(std::span<const env::ExogenousRecord> records, std::size_t split_end,
                                const ForecastConfig& cfg, const ForecastBounds& bounds,
                                TrainingReport* report = nullptr);

/// Prediction of hour t + 1 made at hour t, clamped to physical bounds.
Forecast predict(const ForecastModel& model, std::span<const env::ExogenousRecord> records,
                 std::size_t t);

/// predict() for every hour of the series.
std::vector<Forecast> predict_series(const ForecastModel& model,
                                     std::span<const env::ExogenousRecord> records);

void save_forecaster(std::ostream& os, const ForecastModel& model);
ForecastModel load_forecaster(std::istream& is);

}  // namespace mgrid::forecast
