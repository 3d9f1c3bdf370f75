#include "mgrid/market/xmg.hpp"

#include <algorithm>

namespace mgrid::market {

double xmg_demand(double primary_demand, double noise_draw) {
  const double d = std::max(primary_demand, 0.0);
  return std::clamp(0.05 * d + noise_draw, 0.01 * d, 0.25 * d);
}

double xmg_settle(double demand, double allocation, double bid_price,
                  const env::PriceSchedule& prices) {
  const double shortfall = std::max(demand - allocation, 0.0);
  const double excess = std::max(allocation - demand, 0.0);
  return bid_price * allocation + prices.price_cap * shortfall - prices.feed_in_tariff * excess;
}

}  // namespace mgrid::market
