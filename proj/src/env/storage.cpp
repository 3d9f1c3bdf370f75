#include "mgrid/env/storage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mgrid/common.hpp"

namespace mgrid::env {

std::string_view to_string(EssKind kind) {
  switch (kind) {
    case EssKind::LIB: return "LIB";
    case EssKind::VRB: return "VRB";
    case EssKind::SC: return "SC";
  }
  return "?";
}

EssSpec EssSpec::lithium_ion() {
  return {EssKind::LIB, 2.0, 1.0, 0.9999, 0.95, 100.0, 5000.0, 40.0};
}

EssSpec EssSpec::vanadium_redox() {
  return {EssKind::VRB, 2.0, 1.0, 1.0, 0.80, 200.0, 10000.0, 40.0};
}

EssSpec EssSpec::supercapacitor() {
  return {EssKind::SC, 2.0, 1.0, 0.99, 0.95, 300.0, 100000.0, 6.0};
}

EssSpec EssSpec::defaults(EssKind kind) {
  switch (kind) {
    case EssKind::LIB: return lithium_ion();
    case EssKind::VRB: return vanadium_redox();
    case EssKind::SC: return supercapacitor();
  }
  throw std::invalid_argument("unknown ESS kind");
}

void EssSpec::validate() const {
  const auto name = std::string(to_string(id));
  if (!(capacity_max > 0.0 && power_max > 0.0))
    throw ConfigError(name + ": capacity and power must be positive");
  if (!(sdc_efficiency > 0.0 && sdc_efficiency <= 1.0))
    throw ConfigError(name + ": sdc efficiency must lie in (0, 1]");
  if (!(rte_efficiency > 0.0 && rte_efficiency <= 1.0))
    throw ConfigError(name + ": rte efficiency must lie in (0, 1]");
  if (!(cycle_cost >= 0.0)) throw ConfigError(name + ": negative cycle cost");
}

EssStepResult ess_step(EssState state, double power, const EssSpec& spec) {
  if (std::abs(power) > spec.power_max * (1.0 + 1e-12))
    throw std::invalid_argument("ess_step: |power| exceeds the power rating");
  const double root_rte = std::sqrt(spec.rte_efficiency);
  const double retained = state.charge * spec.sdc_efficiency;
  const double theoretical = power * root_rte + retained;
  const double charge = std::clamp(theoretical, 0.0, spec.capacity_max);
  const double applied = charge == theoretical ? power : (charge - retained) / root_rte;
  return {EssState{charge}, applied, theoretical};
}

double cpc_penalty(double c_prev, double c_new, const EssSpec& spec) {
  const double swing = (c_new - c_prev) / spec.capacity_max;
  return 0.5 * spec.cycle_cost * swing * swing;
}

double cap_penalty(double c, const EssSpec& spec, const PriceSchedule& prices) {
  if (c < 0.0) return prices.price_cap * c * c / spec.power_max;
  if (c > spec.capacity_max) {
    const double over = c - spec.capacity_max;
    return prices.price_cap * over * over / spec.power_max;
  }
  return 0.0;
}

double sdc_penalty(EssState state, const EssSpec& spec, const PriceSchedule& prices, SdcMode mode) {
  const double fill = state.charge / spec.capacity_max;
  const double factor = mode == SdcMode::Literal ? spec.sdc_efficiency : 1.0 - spec.sdc_efficiency;
  return prices.price_cap * fill * factor;
}

}  // namespace mgrid::env
