#pragma once

namespace mgrid::env {

/// Utility tariff: wholesale purchases are capped at `price_cap`, exports are
/// always paid the fixed `feed_in_tariff`. Both in currency/MWh.
struct PriceSchedule {
  double price_cap = 144.0;
  double feed_in_tariff = 16.0;

  void validate() const;

  double buy_price(double wholesale) const { return wholesale < price_cap ? wholesale : price_cap; }

  /// Price applied to a signed grid exchange (positive import, negative export).
  double exchange_price(double grid_import, double wholesale) const {
    return grid_import > 0.0 ? buy_price(wholesale) : feed_in_tariff;
  }
};

}  // namespace mgrid::env
