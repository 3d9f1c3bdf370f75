#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "mgrid/env/microgrid.hpp"
#include "mgrid/forecast/forecast.hpp"
#include "mgrid/nn/network.hpp"

namespace mgrid::ma {

enum class Feature {
  ChargeLib,
  ChargeVrb,
  ChargeSc,
  Demand,
  Price,
  WindOutput,
  SolarOutput,
  HourOfDaySin,
  HourOfDayCos,
  HourOfWeekSin,
  HourOfWeekCos,
  ForecastDemand,
  ForecastPrice,
  ForecastWind,
  ForecastSolar,
  OfferVolume,   // aggregator sell volume (previous step for primary agents, current for xMGs)
  ReservePrice,
  OwnDemand,     // an external microgrid's own load
  ChainAction1,  // actions of preceding agents in a chained joint action
  ChainAction2,
};

std::string_view to_string(Feature f);

/// Features an external microgrid must never observe.
bool is_primary_private(Feature f);

using ObservationSchema = std::vector<Feature>;

/// ESS, aggregator and global agents. Case 2 appends the aggregator's last offer.
ObservationSchema primary_schema(int case_id);
/// External microgrids: calendar, price, the aggregator's last offer and own demand.
ObservationSchema xmg_schema();
/// Schema extended with slots for the actions of preceding chained agents.
ObservationSchema chained_schema(ObservationSchema base, std::size_t slots);

struct FeatureRange {
  double lo = 0.0;
  double hi = 1.0;
  double normalise(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
};

/// Min-max constants, fitted on the training split and frozen afterwards.
struct ObservationNormaliser {
  FeatureRange demand, price, wind, solar, own_demand, offer_volume, reserve_price;
  std::array<double, env::kEssCount> capacity{2.0, 2.0, 2.0};

  static ObservationNormaliser fit(std::span<const env::ExogenousRecord> training,
                                   const env::EnvConfig& config);
};

/// Everything an observation may be built from at one step.
struct ObservationContext {
  const env::ExogenousRecord* record = nullptr;
  std::array<double, env::kEssCount> charges{};
  forecast::Forecast forecast;  // zeros when forecasts are disabled
  market::MgaOffer offer;
  double own_demand = 0.0;
  std::array<double, 2> chain_actions{};  // in [-1, 1]
};

/// Encodes the schema's features in order. Hours use sin/cos pairs; other
/// features are min-max scaled with the frozen constants.
nn::Vector build_observation(const ObservationSchema& schema, const ObservationContext& ctx,
                             const ObservationNormaliser& norm);

}  // namespace mgrid::ma
