#pragma once

#include <array>
#include <string_view>

#include "mgrid/env/prices.hpp"

namespace mgrid::env {

enum class EssKind { LIB, VRB, SC };

inline constexpr std::array<EssKind, 3> kEssKinds{EssKind::LIB, EssKind::VRB, EssKind::SC};

std::string_view to_string(EssKind kind);

/// Static storage parameters. Capacity in MWh, power in MW, costs in currency.
struct EssSpec {
  EssKind id = EssKind::LIB;
  double capacity_max = 2.0;
  double power_max = 1.0;
  double sdc_efficiency = 1.0;  // fraction of charge retained per hour
  double rte_efficiency = 1.0;  // round trip
  double capacity_cost = 0.0;   // currency per kWh
  double lifecycles = 1.0;
  double cycle_cost = 0.0;      // currency per full cycle

  static EssSpec lithium_ion();
  static EssSpec vanadium_redox();
  static EssSpec supercapacitor();
  static EssSpec defaults(EssKind kind);

  /// capacity_cost * capacity (kWh) / lifecycles.
  double derived_cycle_cost() const { return capacity_cost * capacity_max * 1000.0 / lifecycles; }

  void validate() const;
};

struct EssState {
  double charge = 0.0;  // MWh
};

struct EssStepResult {
  EssState state;
  double applied_power = 0.0;       // after clamping, MW
  double theoretical_charge = 0.0;  // before clamping, MWh
};

/// Advances one hour: charge = power * sqrt(rte) + previous * sdc, clamped to
/// [0, capacity]. Positive power charges. Throws std::invalid_argument when
/// |power| exceeds the power rating.
EssStepResult ess_step(EssState state, double power, const EssSpec& spec);

/// Half-cycle degradation cost of moving from c_prev to c_new.
double cpc_penalty(double c_prev, double c_new, const EssSpec& spec);

/// Quadratic penalty for a theoretical charge outside [0, capacity].
double cap_penalty(double theoretical_charge, const EssSpec& spec, const PriceSchedule& prices);

enum class SdcMode {
  EnergyLost,  // price_cap * (c / C_max) * (1 - sdc)
  Literal,     // price_cap * (c / C_max) * sdc
};

double sdc_penalty(EssState state, const EssSpec& spec, const PriceSchedule& prices, SdcMode mode);

}  // namespace mgrid::env
