#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mgrid::env {

enum class ConverterKind { Inverter, Transformer };

/// Polynomial loss model: with load factor lf = load / rated_load,
/// efficiency = lf / (lf + c0 + c1 lf + c2 lf^2), bounded below by the floor
/// and above by the ceiling.
struct ConverterSpec {
  ConverterKind kind = ConverterKind::Inverter;
  double rated_load = 1.0;  // MW
  std::array<double, 3> loss_coefficients{0.01, 0.02, 0.05};
  double efficiency_floor = 0.10;
  double efficiency_ceiling = 0.99;

  void validate() const;
};

double converter_efficiency(double load, const ConverterSpec& spec);

struct DispatchResult {
  double efficiency = 0.0;  // aggregate: 1 - loss / throughput
  double loss = 0.0;        // MW
  std::vector<std::size_t> subset;
};

/// Chooses the inverter combination with the smallest conversion loss for a
/// given DC-side flow. Power is shared in proportion to rating, so every unit
/// in a subset runs at the same load factor. Ties go to the smaller total
/// rating, then to the lower index mask. Throws std::invalid_argument when the
/// flow exceeds the combined rating.
DispatchResult inverter_dispatch(double dc_power, std::span<const ConverterSpec> inverters);

/// The full set of conversion devices in the primary microgrid.
struct ConverterSet {
  std::vector<ConverterSpec> inverters;
  ConverterSpec wt_transformer;
  ConverterSpec grid_transformer;
  ConverterSpec xmg_transformer;

  static ConverterSet defaults();
  void validate() const;
};

struct GridImportResult {
  double grid_import = 0.0;  // MWh at the utility side, positive = import
  double inverter_efficiency = 1.0;
  double wt_transformer_efficiency = 1.0;
  double grid_transformer_efficiency = 1.0;
  std::vector<std::size_t> inverter_subset;
};

/// X_in = (demand + x_dc * eta_inv - wt * eta_wt) * eta_grid, each efficiency
/// evaluated at its own throughput. The grid transformer saturates at its
/// rated load factor rather than rejecting overloads.
GridImportResult grid_import(double demand, double x_dc, double wt, const ConverterSet& converters);

}  // namespace mgrid::env
