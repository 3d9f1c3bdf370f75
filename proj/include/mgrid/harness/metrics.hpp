#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgrid/env/microgrid.hpp"

namespace mgrid::harness {

/// Primary-grid quantities of one simulated hour.
struct StepLog {
  int episode = 0;
  std::size_t t = 0;
  int hour_of_week = 0;
  double demand = 0.0;
  double price = 0.0;
  double wt = 0.0;
  double pv = 0.0;
  std::array<double, env::kEssCount> ess_power{};
  std::array<double, env::kEssCount> charge{};  // after the step
  double grid_import = 0.0;
  double exchange_price = 0.0;
  double r_in = 0.0;
  double r_mga = 0.0;
  double idle_value = 0.0;
  double mga_idle_value = 0.0;  // R_in + R_MGA had only the aggregator stayed idle
  double cpc = 0.0;
  double sdc = 0.0;
  double cap = 0.0;
  double offer_volume = 0.0;
  double reserve_price = 0.0;
  double sold = 0.0;  // filled auction volume

  double savings() const { return r_in + r_mga - idle_value; }
};

struct EpisodeMetrics {
  int episode = 0;
  bool evaluation = false;
  double raw_savings = 0.0;       // sum of R_in + R_MGA against the idle grid
  double adjusted_savings = 0.0;  // raw minus cycle and self-discharge costs
  double cpc = 0.0;
  double sdc = 0.0;
  double cap = 0.0;
  double mga_revenue = 0.0;  // gross auction income
  double mga_net = 0.0;      // marginal contribution of the aggregator
  double reward = 0.0;       // global reward sum, currency
  double ess_loss_pct = 0.0;
  bool ess_loss_undefined = false;
  double mga_share_pct = 0.0;
};

/// Aggregates one episode's step logs.
EpisodeMetrics compute_metrics(std::span<const StepLog> steps, int episode, bool evaluation);

struct RunSummary {
  int eval_episodes = 0;
  double raw_savings = 0.0;
  double adjusted_savings = 0.0;
  double cpc = 0.0;
  double sdc = 0.0;
  double cap = 0.0;
  double mga_revenue = 0.0;
  double mga_net = 0.0;
  double ess_loss_pct = 0.0;
  bool ess_loss_undefined = false;
  double mga_share_pct = 0.0;
};

/// Sums the evaluation-window episodes only.
RunSummary summarise(std::span<const EpisodeMetrics> episodes);

/// ESS loss and aggregator share percentages; loss is reported as 0 with the
/// flag set when raw savings are not positive.
void fill_percentages(double raw, double adjusted, double mga_revenue, double& ess_loss_pct, bool& undefined,
                      double& mga_share_pct);

/// (adjusted - reference) / reference, in percent; empty when undefined.
std::optional<double> vs_reference_pct(double adjusted, double reference_adjusted);

/// Trailing mean over `window` points.
std::vector<double> trailing_mean(std::span<const double> values, std::size_t window);

}  // namespace mgrid::harness
