#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mgrid/env/converter.hpp"
#include "mgrid/env/generation.hpp"
#include "mgrid/env/prices.hpp"
#include "mgrid/env/record.hpp"
#include "mgrid/env/reward.hpp"
#include "mgrid/env/storage.hpp"
#include "mgrid/market/auction.hpp"

namespace mgrid::env {

inline constexpr std::size_t kEssCount = 3;

struct EnvConfig {
  std::array<EssSpec, kEssCount> ess{EssSpec::lithium_ion(), EssSpec::vanadium_redox(),
                                     EssSpec::supercapacitor()};
  WindTurbineSpec wind;
  SolarFarmSpec solar;
  PriceSchedule prices;
  ConverterSet converters = ConverterSet::defaults();
  SdcMode sdc_mode = SdcMode::EnergyLost;
  double initial_charge_fraction = 0.0;

  // trading side
  int xmg_count = 5;
  double xmg_noise_std = 0.01;
  double xmg_volume_cap_fraction = 0.25;  // of primary demand
  double mga_revenue_share = market::kMgaRevenueShare;
  double mga_volume_limit = 3.0;          // MW, total ESS power
  bool mga_volume_includes_res_surplus = true;

  void validate() const;
  double total_ess_power() const;
};

/// Controllable elements of the primary microgrid, used to describe which
/// actions are zeroed in a counterfactual.
using ActuatorMask = std::uint32_t;
inline constexpr ActuatorMask kActuatorLib = 1u << 0;
inline constexpr ActuatorMask kActuatorVrb = 1u << 1;
inline constexpr ActuatorMask kActuatorSc = 1u << 2;
inline constexpr ActuatorMask kActuatorMga = 1u << 3;
inline constexpr ActuatorMask kAllActuators = kActuatorLib | kActuatorVrb | kActuatorSc | kActuatorMga;

inline constexpr ActuatorMask ess_actuator(std::size_t index) { return 1u << index; }

/// DC-line net demand: sum of ESS power times round-trip efficiency, minus PV.
double dc_net_demand(const std::array<double, kEssCount>& ess_power, double pv,
                     const std::array<EssSpec, kEssCount>& specs);

struct GridEvaluation {
  double x_dc = 0.0;
  double grid_import = 0.0;
  double price = 0.0;  // applied to grid_import
  double r_in = 0.0;
  double r_mga = 0.0;
  double sold_volume = 0.0;
  GridImportResult conversion;
  market::AuctionOutcome auction;

  double value() const { return r_in + r_mga; }
};

/// Everything needed to replay a step's grid exchange with substituted actions.
struct StepSnapshot {
  const EnvConfig* config = nullptr;
  ExogenousRecord record;
  std::array<double, kEssCount> ess_power{};  // applied, after clamping
  market::MgaOffer offer;
  std::vector<market::Bid> bids;
};

/// Grid exchange and auction for fixed ESS powers and offer. Aggregator volume
/// is procured on the demand side and then sold through the auction.
GridEvaluation evaluate_grid(const EnvConfig& config, const ExogenousRecord& record,
                             const std::array<double, kEssCount>& ess_power,
                             const market::MgaOffer& offer, std::span<const market::Bid> bids);

/// R_in + R_MGA had the actuators in `idle` done nothing this step.
double counterfactual_value(const StepSnapshot& snapshot, ActuatorMask idle);

/// Global baseline: every ESS and the aggregator idle.
double idle_baseline(const StepSnapshot& snapshot);

/// Marginal-contribution baseline: only the actuators owned by one agent idle.
double marginal_baseline(const StepSnapshot& snapshot, ActuatorMask agent_actuators);

struct StepControls {
  std::array<double, kEssCount> ess_power{};  // requested, MW
  market::MgaOffer offer;                     // in effect for this step
  std::vector<market::Bid> bids;
  std::vector<double> xmg_demands;            // one per bid
};

struct EssStepRecord {
  double requested = 0.0;
  double applied = 0.0;
  double theoretical_charge = 0.0;
  double charge_before = 0.0;
  double charge_after = 0.0;
  EssPenalties penalties;
};

struct StepOutcome {
  std::array<EssStepRecord, kEssCount> ess;
  GridEvaluation grid;
  StepSnapshot snapshot;
  double idle_value = 0.0;           // counterfactual_value with everything idle
  std::vector<double> xmg_delivered; // after the xMG transformer
  std::vector<double> xmg_costs;
  std::vector<double> xmg_grid_only_costs;

  EssPenalties total_penalties() const;
  EssPenalties penalties(ActuatorMask actuators) const;
};

/// Deterministic physics and reward state of the primary microgrid.
class Microgrid {
 public:
  explicit Microgrid(EnvConfig config);

  const EnvConfig& config() const { return config_; }
  const std::array<EssState, kEssCount>& ess_states() const { return ess_; }
  void reset();
  void set_ess_states(const std::array<EssState, kEssCount>& states) { ess_ = states; }

  StepOutcome step(const ExogenousRecord& record, const StepControls& controls);

 private:
  EnvConfig config_;
  std::array<EssState, kEssCount> ess_;
};

}  // namespace mgrid::env
