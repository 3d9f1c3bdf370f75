#include "mgrid/env/converter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mgrid/common.hpp"

namespace mgrid::env {

void ConverterSpec::validate() const {
  if (!(rated_load > 0.0)) throw ConfigError("converter: rated_load must be positive");
  if (!(efficiency_floor > 0.0 && efficiency_floor < 1.0))
    throw ConfigError("converter: efficiency floor must lie in (0, 1)");
  if (!(efficiency_ceiling >= efficiency_floor && efficiency_ceiling <= 1.0))
    throw ConfigError("converter: efficiency ceiling must lie in [floor, 1]");
  for (double c : loss_coefficients)
    if (!(c >= 0.0)) throw ConfigError("converter: loss coefficients must be non-negative");
}

double converter_efficiency(double load, const ConverterSpec& spec) {
  const double lf = std::abs(load) / spec.rated_load;
  if (lf <= 0.0) return spec.efficiency_floor;
  const auto& c = spec.loss_coefficients;
  const double eta = lf / (lf + c[0] + c[1] * lf + c[2] * lf * lf);
  return std::clamp(eta, spec.efficiency_floor, spec.efficiency_ceiling);
}

DispatchResult inverter_dispatch(double dc_power, std::span<const ConverterSpec> inverters) {
  const std::size_t n = inverters.size();
  if (n == 0 || n >= 31) throw std::invalid_argument("inverter_dispatch: need 1..30 inverters");
  const double flow = std::abs(dc_power);

  double total_rating = 0.0;
  for (const auto& inv : inverters) total_rating += inv.rated_load;
  if (flow > total_rating * (1.0 + 1e-12))
    throw std::invalid_argument("inverter_dispatch: flow exceeds combined inverter rating");

  unsigned best_mask = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  double best_rating = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double rating = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) rating += inverters[i].rated_load;
    if (rating < flow) continue;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      const double share = flow * inverters[i].rated_load / rating;
      loss += share * (1.0 - converter_efficiency(share, inverters[i]));
    }
    if (loss < best_loss || (loss == best_loss && rating < best_rating)) {
      best_loss = loss;
      best_rating = rating;
      best_mask = mask;
    }
  }

  DispatchResult result;
  for (std::size_t i = 0; i < n; ++i)
    if (best_mask & (1u << i)) result.subset.push_back(i);
  result.loss = best_loss;
  if (flow > 0.0) {
    result.efficiency = 1.0 - best_loss / flow;
  } else {
    // Idle: report the floor efficiency of the chosen (smallest) unit.
    result.efficiency = converter_efficiency(0.0, inverters[result.subset.front()]);
  }
  return result;
}

ConverterSet ConverterSet::defaults() {
  ConverterSet set;
  for (double rating : {1.0, 2.0, 5.0}) {
    ConverterSpec inv;
    inv.kind = ConverterKind::Inverter;
    inv.rated_load = rating;
    set.inverters.push_back(inv);
  }
  set.wt_transformer.kind = ConverterKind::Transformer;
  set.wt_transformer.rated_load = 2.0;
  set.grid_transformer.kind = ConverterKind::Transformer;
  set.grid_transformer.rated_load = 2.0;
  set.xmg_transformer.kind = ConverterKind::Transformer;
  set.xmg_transformer.rated_load = 1.0;
  return set;
}

void ConverterSet::validate() const {
  if (inverters.empty()) throw ConfigError("converters: at least one inverter is required");
  for (const auto& inv : inverters) inv.validate();
  wt_transformer.validate();
  grid_transformer.validate();
  xmg_transformer.validate();
}

GridImportResult grid_import(double demand, double x_dc, double wt, const ConverterSet& converters) {
  GridImportResult out;
  const auto dispatch = inverter_dispatch(x_dc, converters.inverters);
  out.inverter_efficiency = dispatch.efficiency;
  out.inverter_subset = dispatch.subset;
  out.wt_transformer_efficiency = converter_efficiency(wt, converters.wt_transformer);

  const double ac_side = demand + x_dc * out.inverter_efficiency - wt * out.wt_transformer_efficiency;
  const double grid_rating = converters.grid_transformer.rated_load;
  const double grid_load = std::min(std::abs(ac_side), grid_rating);
  out.grid_transformer_efficiency = converter_efficiency(grid_load, converters.grid_transformer);
  out.grid_import = ac_side * out.grid_transformer_efficiency;
  return out;
}

}  // namespace mgrid::env
