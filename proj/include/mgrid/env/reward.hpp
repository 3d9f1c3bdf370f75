#pragma once

namespace mgrid::env {

struct EssPenalties {
  double cpc = 0.0;
  double sdc = 0.0;
  double cap = 0.0;

  EssPenalties& operator+=(const EssPenalties& o) {
    cpc += o.cpc;
    sdc += o.sdc;
    cap += o.cap;
    return *this;
  }
  double total() const { return cpc + sdc + cap; }
};

/// Every reward term of one step for one agent, in currency, plus the scaled
/// learning signal.
struct RewardBreakdown {
  double r_in = 0.0;
  double r_mga = 0.0;
  double r_cpc = 0.0;
  double r_sdc = 0.0;
  double r_cap = 0.0;
  double r_base = 0.0;
  double r_sum = 0.0;
  double scaled_reward = 0.0;
};

/// Grid exchange value: -x_in * price.
inline double grid_exchange_reward(double grid_import, double price) { return -grid_import * price; }

/// r_sum = r_in + r_mga - cpc - sdc - cap - baseline;
/// scaled = 0.01 * n_agents * r_sum.
RewardBreakdown step_reward(double grid_import, double price, double mga_revenue,
                            const EssPenalties& penalties, double baseline, int n_agents);

inline constexpr double kRewardScale = 0.01;

}  // namespace mgrid::env
