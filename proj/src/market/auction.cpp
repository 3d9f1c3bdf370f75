#include "mgrid/market/auction.hpp"

#include <algorithm>
#include <stdexcept>

namespace mgrid::market {

void validate_bid(const Bid& bid, const env::PriceSchedule& prices) {
  if (!(bid.volume >= 0.0)) throw std::invalid_argument("bid volume must be non-negative");
  if (!(bid.price >= prices.feed_in_tariff && bid.price <= prices.price_cap))
    throw std::invalid_argument("bid price outside [feed-in tariff, price cap]");
}

AuctionOutcome run_auction(const MgaOffer& offer, std::span<const Bid> bids,
                           const env::PriceSchedule& prices, double revenue_share) {
  AuctionOutcome out;
  out.allocations.assign(bids.size(), 0.0);

  std::vector<double> volumes(bids.size());
  std::vector<double> bid_prices(bids.size());
  for (std::size_t i = 0; i < bids.size(); ++i) {
    volumes[i] = bids[i].volume;
    bid_prices[i] = bids[i].price;
  }
  std::vector<bool> open(bids.size(), true);

  double remaining = std::max(offer.sell_volume, 0.0);
  auto any_volume = [&] {
    for (std::size_t i = 0; i < bids.size(); ++i)
      if (open[i] && volumes[i] > 0.0) return true;
    return false;
  };

  while (remaining > 0.0 && any_volume()) {
    // argmax over open bids; price ties go to the lowest agent id
    std::size_t best = bids.size();
    for (std::size_t i = 0; i < bids.size(); ++i) {
      if (!open[i]) continue;
      if (best == bids.size() || bid_prices[i] > bid_prices[best] ||
          (bid_prices[i] == bid_prices[best] && bids[i].agent_id < bids[best].agent_id))
        best = i;
    }
    if (bid_prices[best] > offer.reserve_price && volumes[best] > 0.0) {
      const double fill = std::min(remaining, volumes[best]);
      out.mga_revenue += revenue_share * bid_prices[best] * fill;
      remaining -= fill;
      out.allocations[best] += fill;
      out.trace.push_back({bids[best].agent_id, fill, bid_prices[best]});
    }
    open[best] = false;
  }

  out.unsold = remaining;
  out.mga_revenue += prices.feed_in_tariff * remaining;
  return out;
}

}  // namespace mgrid::market
