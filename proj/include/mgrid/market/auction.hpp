#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mgrid/env/prices.hpp"

namespace mgrid::market {

struct Bid {
  std::size_t agent_id = 0;
  double volume = 0.0;  // MWh
  double price = 0.0;   // currency/MWh
};

/// The aggregator's sell side for one step.
struct MgaOffer {
  double sell_volume = 0.0;    // MWh
  double reserve_price = 0.0;  // currency/MWh
};

struct Fill {
  std::size_t agent_id = 0;
  double volume = 0.0;
  double price = 0.0;
};

struct AuctionOutcome {
  double mga_revenue = 0.0;
  std::vector<double> allocations;  // indexed like the input bids
  double unsold = 0.0;
  std::vector<Fill> trace;          // in clearing order
};

inline constexpr double kMgaRevenueShare = 0.8;

/// Sealed-bid clearing: repeatedly take the highest remaining bid (ties to the
/// lowest agent id), fill min(remaining, bid volume) when its price strictly
/// exceeds the reserve, and credit 0.8 * price * fill. Whatever is left is
/// exported at the feed-in tariff.
AuctionOutcome run_auction(const MgaOffer& offer, std::span<const Bid> bids,
                           const env::PriceSchedule& prices,
                           double revenue_share = kMgaRevenueShare);

/// Checks the Bid invariants; throws std::invalid_argument on violation.
void validate_bid(const Bid& bid, const env::PriceSchedule& prices);

}  // namespace mgrid::market
