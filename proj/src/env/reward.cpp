#include "mgrid/env/reward.hpp"

namespace mgrid::env {

RewardBreakdown step_reward(double grid_import, double price, double mga_revenue,
                            const EssPenalties& penalties, double baseline, int n_agents) {
  RewardBreakdown r;
  r.r_in = grid_exchange_reward(grid_import, price);
  r.r_mga = mga_revenue;
  r.r_cpc = penalties.cpc;
  r.r_sdc = penalties.sdc;
  r.r_cap = penalties.cap;
  r.r_base = baseline;
  r.r_sum = r.r_in + r.r_mga - r.r_cpc - r.r_sdc - r.r_cap - r.r_base;
  r.scaled_reward = kRewardScale * n_agents * r.r_sum;
  return r;
}

}  // namespace mgrid::env
