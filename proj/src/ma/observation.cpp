#include "mgrid/ma/observation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mgrid::ma {

std::string_view to_string(Feature f) {
  switch (f) {
    case Feature::ChargeLib: return "charge_lib";
    case Feature::ChargeVrb: return "charge_vrb";
    case Feature::ChargeSc: return "charge_sc";
    case Feature::Demand: return "demand";
    case Feature::Price: return "price";
    case Feature::WindOutput: return "wt_output";
    case Feature::SolarOutput: return "pv_output";
    case Feature::HourOfDaySin: return "hour_of_day_sin";
    case Feature::HourOfDayCos: return "hour_of_day_cos";
    case Feature::HourOfWeekSin: return "hour_of_week_sin";
    case Feature::HourOfWeekCos: return "hour_of_week_cos";
    case Feature::ForecastDemand: return "forecast_demand";
    case Feature::ForecastPrice: return "forecast_price";
    case Feature::ForecastWind: return "forecast_wt";
    case Feature::ForecastSolar: return "forecast_pv";
    case Feature::OfferVolume: return "offer_volume";
    case Feature::ReservePrice: return "reserve_price";
    case Feature::OwnDemand: return "own_demand";
    case Feature::ChainAction1: return "chain_action_1";
    case Feature::ChainAction2: return "chain_action_2";
  }
  return "?";
}

bool is_primary_private(Feature f) {
  switch (f) {
    case Feature::ChargeLib:
    case Feature::ChargeVrb:
    case Feature::ChargeSc:
    case Feature::Demand:
    case Feature::WindOutput:
    case Feature::SolarOutput:
    case Feature::ForecastDemand:
    case Feature::ForecastWind:
    case Feature::ForecastSolar:
    case Feature::ChainAction1:
    case Feature::ChainAction2:
      return true;
    default:
      return false;
  }
}

ObservationSchema primary_schema(int case_id) {
  ObservationSchema s{Feature::ChargeLib,     Feature::ChargeVrb,     Feature::ChargeSc,
                      Feature::Demand,        Feature::Price,         Feature::WindOutput,
                      Feature::SolarOutput,   Feature::HourOfDaySin,  Feature::HourOfDayCos,
                      Feature::HourOfWeekSin, Feature::HourOfWeekCos, Feature::ForecastDemand,
                      Feature::ForecastPrice, Feature::ForecastWind,  Feature::ForecastSolar};
  if (case_id == 2) {
    s.push_back(Feature::OfferVolume);
    s.push_back(Feature::ReservePrice);
  }
  return s;
}

ObservationSchema xmg_schema() {
  return {Feature::HourOfDaySin,  Feature::HourOfDayCos, Feature::HourOfWeekSin,
          Feature::HourOfWeekCos, Feature::Price,        Feature::OfferVolume,
          Feature::ReservePrice,  Feature::OwnDemand};
}

ObservationSchema chained_schema(ObservationSchema base, std::size_t slots) {
  if (slots > 2) throw std::invalid_argument("chained_schema: at most two chain slots");
  if (slots >= 1) base.push_back(Feature::ChainAction1);
  if (slots >= 2) base.push_back(Feature::ChainAction2);
  return base;
}

namespace {

FeatureRange range_of(std::span<const env::ExogenousRecord> records, double (*get)(const env::ExogenousRecord&)) {
  FeatureRange r{0.0, 0.0};
  if (records.empty()) return {0.0, 1.0};
  r.lo = r.hi = get(records.front());
  for (const auto& rec : records) {
    r.lo = std::min(r.lo, get(rec));
    r.hi = std::max(r.hi, get(rec));
  }
  return r;
}

}  // namespace

ObservationNormaliser ObservationNormaliser::fit(std::span<const env::ExogenousRecord> training,
                                                 const env::EnvConfig& config) {
  ObservationNormaliser n;
  n.demand = range_of(training, [](const env::ExogenousRecord& r) { return r.demand; });
  n.price = range_of(training, [](const env::ExogenousRecord& r) { return r.wholesale_price; });
  n.wind = {0.0, config.wind.farm_capacity()};
  n.solar = {0.0, config.solar.rated_power};
  n.own_demand = {0.0, config.xmg_volume_cap_fraction * n.demand.hi};
  const double surplus_max = config.mga_volume_includes_res_surplus
                                 ? config.wind.farm_capacity() + config.solar.rated_power
                                 : 0.0;
  n.offer_volume = {0.0, config.mga_volume_limit + surplus_max};
  n.reserve_price = {config.prices.feed_in_tariff, config.prices.price_cap};
  for (std::size_t i = 0; i < env::kEssCount; ++i) n.capacity[i] = config.ess[i].capacity_max;
  return n;
}

nn::Vector build_observation(const ObservationSchema& schema, const ObservationContext& ctx,
                             const ObservationNormaliser& norm) {
  if (!ctx.record) throw std::invalid_argument("build_observation: missing record");
  const auto& r = *ctx.record;
  const double tau = 2.0 * std::numbers::pi;
  nn::Vector v(static_cast<Eigen::Index>(schema.size()));
  for (std::size_t i = 0; i < schema.size(); ++i) {
    double x = 0.0;
    switch (schema[i]) {
      case Feature::ChargeLib: x = ctx.charges[0] / norm.capacity[0]; break;
      case Feature::ChargeVrb: x = ctx.charges[1] / norm.capacity[1]; break;
      case Feature::ChargeSc: x = ctx.charges[2] / norm.capacity[2]; break;
      case Feature::Demand: x = norm.demand.normalise(r.demand); break;
      case Feature::Price: x = norm.price.normalise(r.wholesale_price); break;
      case Feature::WindOutput: x = norm.wind.normalise(r.wt_output); break;
      case Feature::SolarOutput: x = norm.solar.normalise(r.pv_output); break;
      case Feature::HourOfDaySin: x = std::sin(tau * r.hour_of_day / 24.0); break;
      case Feature::HourOfDayCos: x = std::cos(tau * r.hour_of_day / 24.0); break;
      case Feature::HourOfWeekSin: x = std::sin(tau * r.hour_of_week / 168.0); break;
      case Feature::HourOfWeekCos: x = std::cos(tau * r.hour_of_week / 168.0); break;
      case Feature::ForecastDemand: x = norm.demand.normalise(ctx.forecast.demand); break;
      case Feature::ForecastPrice: x = norm.price.normalise(ctx.forecast.price); break;
      case Feature::ForecastWind: x = norm.wind.normalise(ctx.forecast.wt); break;
      case Feature::ForecastSolar: x = norm.solar.normalise(ctx.forecast.pv); break;
      case Feature::OfferVolume: x = norm.offer_volume.normalise(ctx.offer.sell_volume); break;
      case Feature::ReservePrice: x = norm.reserve_price.normalise(ctx.offer.reserve_price); break;
      case Feature::OwnDemand: x = norm.own_demand.normalise(ctx.own_demand); break;
      case Feature::ChainAction1: x = ctx.chain_actions[0]; break;
      case Feature::ChainAction2: x = ctx.chain_actions[1]; break;
    }
    v(static_cast<Eigen::Index>(i)) = x;
  }
  return v;
}

}  // namespace mgrid::ma
