#pragma once

#include "mgrid/env/prices.hpp"

namespace mgrid::market {

/// External microgrid load for one hour: 0.05 * primary demand plus noise,
/// clamped to [0.01, 0.25] * primary demand.
double xmg_demand(double primary_demand, double noise_draw);

/// Net energy bill of an external microgrid for one step. Volume received from
/// the aggregator is paid at the bid price; any shortfall is bought at the
/// price cap and any excess is exported at the feed-in tariff.
double xmg_settle(double demand, double allocation, double bid_price,
                  const env::PriceSchedule& prices);

/// Bill if the whole demand were bought from the utility at the price cap.
inline double xmg_grid_only_cost(double demand, const env::PriceSchedule& prices) {
  return prices.price_cap * demand;
}

}  // namespace mgrid::market
