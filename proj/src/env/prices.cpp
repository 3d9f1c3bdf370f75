#include "mgrid/env/prices.hpp"

#include "mgrid/common.hpp"

namespace mgrid::env {

void PriceSchedule::validate() const {
  if (!(price_cap >= 0.0 && feed_in_tariff >= 0.0))
    throw ConfigError("prices: caps and tariffs must be non-negative");
  if (!(feed_in_tariff < price_cap))
    throw ConfigError("prices: feed-in tariff must be below the price cap");
}

}  // namespace mgrid::env
