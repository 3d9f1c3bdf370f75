#include "mgrid/env/microgrid.hpp"

#include <algorithm>
#include <stdexcept>

#include "mgrid/common.hpp"
#include "mgrid/market/xmg.hpp"

namespace mgrid::env {

void EnvConfig::validate() const {
  for (const auto& spec : ess) spec.validate();
  for (std::size_t i = 0; i < kEssCount; ++i)
    if (ess[i].id != kEssKinds[i]) throw ConfigError("ess: entries must be ordered LIB, VRB, SC");
  wind.validate();
  solar.validate();
  prices.validate();
  converters.validate();
  if (!(initial_charge_fraction >= 0.0 && initial_charge_fraction <= 1.0))
    throw ConfigError("initial_charge_fraction must lie in [0, 1]");
  if (xmg_count < 0) throw ConfigError("xmg_count must be non-negative");
  if (!(xmg_noise_std >= 0.0)) throw ConfigError("xmg_noise_std must be non-negative");
  if (!(xmg_volume_cap_fraction > 0.0)) throw ConfigError("xmg_volume_cap_fraction must be positive");
  if (!(mga_revenue_share > 0.0 && mga_revenue_share <= 1.0))
    throw ConfigError("mga_revenue_share must lie in (0, 1]");
  if (!(mga_volume_limit >= 0.0)) throw ConfigError("mga_volume_limit must be non-negative");
}

double EnvConfig::total_ess_power() const {
  double total = 0.0;
  for (const auto& spec : ess) total += spec.power_max;
  return total;
}

double dc_net_demand(const std::array<double, kEssCount>& ess_power, double pv,
                     const std::array<EssSpec, kEssCount>& specs) {
  double x = -pv;
  for (std::size_t i = 0; i < kEssCount; ++i) x += ess_power[i] * specs[i].rte_efficiency;
  return x;
}

GridEvaluation evaluate_grid(const EnvConfig& config, const ExogenousRecord& record,
                             const std::array<double, kEssCount>& ess_power,
                             const market::MgaOffer& offer, std::span<const market::Bid> bids) {
  GridEvaluation g;
  g.x_dc = dc_net_demand(ess_power, record.pv_output, config.ess);
  g.sold_volume = std::max(offer.sell_volume, 0.0);
  g.conversion =
      grid_import(record.demand + g.sold_volume, g.x_dc, record.wt_output, config.converters);
  g.grid_import = g.conversion.grid_import;
  g.price = config.prices.exchange_price(g.grid_import, record.wholesale_price);
  g.r_in = grid_exchange_reward(g.grid_import, g.price);
  if (g.sold_volume > 0.0) {
    g.auction = market::run_auction(offer, bids, config.prices, config.mga_revenue_share);
    g.r_mga = g.auction.mga_revenue;
  } else {
    g.auction.allocations.assign(bids.size(), 0.0);
  }
  return g;
}

double counterfactual_value(const StepSnapshot& s, ActuatorMask idle) {
  auto power = s.ess_power;
  for (std::size_t i = 0; i < kEssCount; ++i)
    if (idle & ess_actuator(i)) power[i] = 0.0;
  market::MgaOffer offer = s.offer;
  if (idle & kActuatorMga) offer.sell_volume = 0.0;
  return evaluate_grid(*s.config, s.record, power, offer, s.bids).value();
}

double idle_baseline(const StepSnapshot& snapshot) {
  return counterfactual_value(snapshot, kAllActuators);
}

double marginal_baseline(const StepSnapshot& snapshot, ActuatorMask agent_actuators) {
  return counterfactual_value(snapshot, agent_actuators);
}

EssPenalties StepOutcome::total_penalties() const { return penalties(kAllActuators); }

EssPenalties StepOutcome::penalties(ActuatorMask actuators) const {
  EssPenalties p;
  for (std::size_t i = 0; i < kEssCount; ++i)
    if (actuators & ess_actuator(i)) p += ess[i].penalties;
  return p;
}

Microgrid::Microgrid(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  reset();
}

void Microgrid::reset() {
  for (std::size_t i = 0; i < kEssCount; ++i)
    ess_[i].charge = config_.initial_charge_fraction * config_.ess[i].capacity_max;
}

StepOutcome Microgrid::step(const ExogenousRecord& record, const StepControls& controls) {
  if (controls.xmg_demands.size() != controls.bids.size())
    throw std::invalid_argument("step: one xMG demand per bid is required");

  StepOutcome out;
  std::array<double, kEssCount> applied{};
  for (std::size_t i = 0; i < kEssCount; ++i) {
    const auto& spec = config_.ess[i];
    const double before = ess_[i].charge;
    const auto res = ess_step(ess_[i], controls.ess_power[i], spec);
    ess_[i] = res.state;
    applied[i] = res.applied_power;

    auto& rec = out.ess[i];
    rec.requested = controls.ess_power[i];
    rec.applied = res.applied_power;
    rec.theoretical_charge = res.theoretical_charge;
    rec.charge_before = before;
    rec.charge_after = res.state.charge;
    rec.penalties.cpc = cpc_penalty(before, res.state.charge, spec);
    rec.penalties.cap = cap_penalty(res.theoretical_charge, spec, config_.prices);
    rec.penalties.sdc = sdc_penalty(res.state, spec, config_.prices, config_.sdc_mode);
  }

  out.snapshot = StepSnapshot{&config_, record, applied, controls.offer, controls.bids};
  out.grid = evaluate_grid(config_, record, applied, controls.offer, controls.bids);
  out.idle_value = idle_baseline(out.snapshot);

  const std::size_t n = controls.bids.size();
  double allocated = 0.0;
  for (double a : out.grid.auction.allocations) allocated += a;
  const double eta_xmg = converter_efficiency(
      std::min(allocated, config_.converters.xmg_transformer.rated_load),
      config_.converters.xmg_transformer);
  out.xmg_delivered.resize(n);
  out.xmg_costs.resize(n);
  out.xmg_grid_only_costs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double delivered = out.grid.auction.allocations[i] * eta_xmg;
    out.xmg_delivered[i] = delivered;
    out.xmg_costs[i] =
        market::xmg_settle(controls.xmg_demands[i], delivered, controls.bids[i].price, config_.prices);
    out.xmg_grid_only_costs[i] = market::xmg_grid_only_cost(controls.xmg_demands[i], config_.prices);
  }
  return out;
}

}  // namespace mgrid::env
