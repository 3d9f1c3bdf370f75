#include <doctest.h>

#include <random>

#include "mgrid/env/microgrid.hpp"
#include "oracles.hpp"

using namespace mgrid;
using namespace mgrid::env;
using doctest::Approx;

namespace {
constexpr double kTol = 1e-9;

ConverterSpec constant_efficiency(double eta, double rating) {
  ConverterSpec s;
  s.kind = ConverterKind::Transformer;
  s.rated_load = rating;
  s.efficiency_floor = eta;
  s.efficiency_ceiling = eta;
  return s;
}

ConverterSet lossless() {
  ConverterSet set = ConverterSet::defaults();
  for (auto& inv : set.inverters) inv.efficiency_floor = inv.efficiency_ceiling = 0.999999;
  for (auto* t : {&set.wt_transformer, &set.grid_transformer, &set.xmg_transformer}) {
    t->loss_coefficients = {0.0, 0.0, 0.0};
    t->efficiency_ceiling = 1.0;
  }
  for (auto& inv : set.inverters) {
    inv.loss_coefficients = {0.0, 0.0, 0.0};
    inv.efficiency_floor = 0.5;
    inv.efficiency_ceiling = 1.0;
  }
  return set;
}
}  // namespace

TEST_CASE("wind power curve") {
  WindTurbineSpec wt;
  CHECK(wind_power(2.0, wt) == 0.0);
  CHECK(wind_power(12.0, wt) == 1.0);
  CHECK(std::abs(wind_power(6.0, wt) - 0.149627) < 1e-6);
  CHECK(std::abs(wind_power(6.0, wt) - 0.5 * 1.225 * std::numbers::pi * 900.0 * 0.4 * 216.0 * 1e-6) < kTol);
  CHECK(wind_power(26.0, wt) == 0.0);
  CHECK(wind_farm_power(12.0, wt) == 2.0);
}

TEST_CASE("wind power is zero outside cut-in/out, monotone, then flat at rated") {
  WindTurbineSpec wt;
  double prev = 0.0;
  for (double v = 0.0; v <= 30.0; v += 0.01) {
    const double p = wind_power(v, wt);
    if (v < wt.cut_in_speed || v > wt.cut_out_speed) {
      CHECK(p == 0.0);
    } else if (v <= wt.rated_speed) {
      CHECK(p >= prev);
      CHECK(p <= wt.rated_power);
    } else {
      CHECK(p == wt.rated_power);
    }
    if (v >= wt.cut_in_speed && v <= wt.cut_out_speed) prev = p;
  }
}

TEST_CASE("pv power scales linearly and clamps at rating") {
  SolarFarmSpec pv;
  CHECK(pv_power(0.0, pv) == 0.0);
  CHECK(std::abs(pv_power(1000.0, pv) - 5.0) < kTol);
  CHECK(std::abs(pv_power(500.0, pv) - 2.5) < kTol);
  CHECK(pv_power(2000.0, pv) == 5.0);
}

TEST_CASE("ess_step examples") {
  EssSpec s = EssSpec::lithium_ion();
  s.sdc_efficiency = 1.0;
  CHECK(ess_step({1.0}, 0.0, s).state.charge == 1.0);

  s.sdc_efficiency = 0.9999;
  s.rte_efficiency = 0.95;
  CHECK(std::abs(ess_step({1.0}, 0.5, s).state.charge - (0.5 * std::sqrt(0.95) + 0.9999)) < kTol);
  CHECK(std::abs(ess_step({1.0}, 0.5, s).state.charge - 1.48724) < 1e-5);

  const EssSpec sc = EssSpec::supercapacitor();
  CHECK(std::abs(ess_step({2.0}, 0.0, sc).state.charge - 1.98) < kTol);

  CHECK_THROWS_AS(ess_step({1.0}, 1.5, s), std::invalid_argument);
}

TEST_CASE("ess_step clamps and reports the applied power") {
  const EssSpec s = EssSpec::lithium_ion();
  const auto full = ess_step({1.9}, 1.0, s);
  CHECK(full.state.charge == s.capacity_max);
  CHECK(full.theoretical_charge > s.capacity_max);
  CHECK(std::abs(full.applied_power * std::sqrt(s.rte_efficiency) + 1.9 * s.sdc_efficiency - 2.0) < kTol);

  const auto empty = ess_step({0.2}, -1.0, s);
  CHECK(empty.state.charge == 0.0);
  CHECK(empty.theoretical_charge < 0.0);
  CHECK(empty.applied_power > -1.0);
}

TEST_CASE("charge stays within bounds for random action streams") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (EssKind kind : kEssKinds) {
    const EssSpec s = EssSpec::defaults(kind);
    EssState st{0.0};
    for (int i = 0; i < 20000; ++i) {
      st = ess_step(st, u(rng) * s.power_max, s).state;
      REQUIRE(st.charge >= 0.0);
      REQUIRE(st.charge <= s.capacity_max);
    }
  }
}

TEST_CASE("cycle cost penalty") {
  const EssSpec lib = EssSpec::lithium_ion();
  CHECK(std::abs(cpc_penalty(0.0, 2.0, lib) - 20.0) < kTol);
  CHECK(cpc_penalty(1.0, 1.0, lib) == 0.0);
  CHECK(std::abs(cpc_penalty(0.5, 1.5, lib) - 5.0) < kTol);
  CHECK(std::abs(cpc_penalty(1.5, 0.5, lib) - 5.0) < kTol);
}

TEST_CASE("cycle cost matches capacity cost, capacity and lifecycles for every storage type") {
  // currency per kWh times kWh divided by lifecycles
  CHECK(EssSpec::lithium_ion().derived_cycle_cost() == 40.0);
  CHECK(EssSpec::vanadium_redox().derived_cycle_cost() == 40.0);
  CHECK(EssSpec::supercapacitor().derived_cycle_cost() == 6.0);
  for (EssKind k : kEssKinds) CHECK(EssSpec::defaults(k).derived_cycle_cost() == EssSpec::defaults(k).cycle_cost);
}

TEST_CASE("capacity penalty") {
  const EssSpec lib = EssSpec::lithium_ion();
  const PriceSchedule prices;
  CHECK(cap_penalty(1.0, lib, prices) == 0.0);
  CHECK(std::abs(cap_penalty(-0.5, lib, prices) - 36.0) < kTol);
  CHECK(std::abs(cap_penalty(2.5, lib, prices) - 36.0) < kTol);
}

TEST_CASE("capacity penalty is continuous at the bounds and increasing in the violation") {
  const EssSpec lib = EssSpec::lithium_ion();
  const PriceSchedule prices;
  CHECK(cap_penalty(0.0, lib, prices) == 0.0);
  CHECK(cap_penalty(-1e-9, lib, prices) < 1e-12);
  CHECK(cap_penalty(lib.capacity_max, lib, prices) == 0.0);
  CHECK(cap_penalty(lib.capacity_max + 1e-9, lib, prices) < 1e-12);
  double below = 0.0, above = 0.0;
  for (double d = 0.01; d < 3.0; d += 0.01) {
    const double b = cap_penalty(-d, lib, prices);
    const double a = cap_penalty(lib.capacity_max + d, lib, prices);
    CHECK(b > below);
    CHECK(a > above);
    below = b;
    above = a;
  }
}

TEST_CASE("self-discharge penalty modes") {
  EssSpec sc = EssSpec::supercapacitor();
  const PriceSchedule prices;
  CHECK(std::abs(sdc_penalty({2.0}, sc, prices, SdcMode::Literal) - 142.56) < kTol);
  CHECK(std::abs(sdc_penalty({2.0}, sc, prices, SdcMode::EnergyLost) - 1.44) < kTol);
  CHECK(sdc_penalty({0.0}, sc, prices, SdcMode::Literal) == 0.0);
  CHECK(sdc_penalty({0.0}, sc, prices, SdcMode::EnergyLost) == 0.0);
}

TEST_CASE("converter efficiency curve") {
  ConverterSpec c;
  CHECK(converter_efficiency(0.0, c) == 0.10);
  CHECK(std::abs(converter_efficiency(1.0, c) - 1.0 / 1.08) < kTol);
  CHECK(std::abs(converter_efficiency(1.0, c) - 0.926) < 5e-4);
  CHECK(std::abs(converter_efficiency(0.5, c) - 0.5 / 0.5325) < kTol);
  CHECK(std::abs(converter_efficiency(0.5, c) - 0.939) < 5e-4);
  c.rated_load = 2.0;
  CHECK(std::abs(converter_efficiency(1.0, c) - 0.5 / 0.5325) < kTol);
  for (double load = 0.0; load <= 2.0; load += 0.001) {
    const double eta = converter_efficiency(load, c);
    CHECK(eta >= c.efficiency_floor);
    CHECK(eta <= c.efficiency_ceiling);
  }
}

TEST_CASE("inverter dispatch") {
  const auto set = ConverterSet::defaults();
  const auto zero = inverter_dispatch(0.0, set.inverters);
  CHECK(zero.loss == 0.0);
  REQUIRE(zero.subset.size() == 1);
  CHECK(zero.subset[0] == 0);  // smallest rating

  const auto d = inverter_dispatch(0.8, set.inverters);
  const auto naive = oracle::naive_dispatch(0.8, set.inverters);
  CHECK(std::abs(d.loss - naive.loss) < 1e-12);
  CHECK(d.subset == naive.subset);
  CHECK(std::abs(d.efficiency - (1.0 - d.loss / 0.8)) < kTol);

  CHECK_THROWS_AS(inverter_dispatch(8.5, set.inverters), std::invalid_argument);
  CHECK_NOTHROW(inverter_dispatch(-8.0, set.inverters));
}

TEST_CASE("inverter dispatch agrees with a brute-force search on 1000 random loads") {
  const auto set = ConverterSet::defaults();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(rng);
    const auto d = inverter_dispatch(p, set.inverters);
    const auto naive = oracle::naive_dispatch(p, set.inverters);
    REQUIRE(std::abs(d.loss - naive.loss) < 1e-12);
    REQUIRE(d.subset == naive.subset);
  }
}

TEST_CASE("dc net demand") {
  const EnvConfig cfg;
  CHECK(dc_net_demand({0.0, 0.0, 0.0}, 0.0, cfg.ess) == 0.0);
  CHECK(std::abs(dc_net_demand({1.0, 0.0, 0.0}, 0.0, cfg.ess) - 0.95) < kTol);
  CHECK(std::abs(dc_net_demand({0.0, 0.0, 0.0}, 2.0, cfg.ess) + 2.0) < kTol);
  CHECK(std::abs(dc_net_demand({0.0, 1.0, -1.0}, 0.5, cfg.ess) - (0.8 - 0.95 - 0.5)) < kTol);
}

TEST_CASE("grid import") {
  ConverterSet set = ConverterSet::defaults();
  set.wt_transformer = constant_efficiency(0.95, 2.0);
  set.grid_transformer = constant_efficiency(0.95, 2.0);
  CHECK(grid_import(0.0, 0.0, 0.0, set).grid_import == 0.0);
  CHECK(std::abs(grid_import(1.0, 0.0, 0.0, set).grid_import - 0.95) < kTol);
  CHECK(std::abs(grid_import(0.0, 0.0, 1.0, set).grid_import + 0.9025) < kTol);
  CHECK_THROWS_AS(grid_import(1.0, 9.0, 0.0, set), std::invalid_argument);
}

TEST_CASE("lossless converters reduce the exchange to a plain energy balance") {
  const ConverterSet set = lossless();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double demand = 3.0 * u(rng), wt = 2.0 * u(rng), x_dc = 6.0 * u(rng) - 3.0;
    const auto r = grid_import(demand, x_dc, wt, set);
    if (std::abs(demand + x_dc - wt) <= set.grid_transformer.rated_load)
      CHECK(std::abs(r.grid_import - (demand + x_dc - wt)) < 1e-9);
  }
}

TEST_CASE("step reward terms") {
  const auto r = step_reward(1.0, 100.0, 0.0, {}, 0.0, 1);
  CHECK(std::abs(r.r_in + 100.0) < kTol);

  const auto s = step_reward(-0.1, 0.0, 10.0, {}, 0.0, 3);
  CHECK(std::abs(s.r_sum - 10.0) < kTol);
  CHECK(std::abs(s.scaled_reward - 0.3) < kTol);

  const auto z = step_reward(0.0, 50.0, 0.0, {}, 0.0, 4);
  CHECK(z.scaled_reward == 0.0);

  const auto full = step_reward(0.5, 40.0, 7.0, EssPenalties{1.0, 2.0, 3.0}, -4.0, 2);
  CHECK(std::abs(full.r_sum - (-20.0 + 7.0 - 1.0 - 2.0 - 3.0 + 4.0)) < kTol);
  CHECK(std::abs(full.scaled_reward - 0.02 * full.r_sum) < kTol);
}

TEST_CASE("exchange price uses the capped wholesale price on import and the tariff on export") {
  const PriceSchedule p;
  CHECK(p.exchange_price(1.0, 60.0) == 60.0);
  CHECK(p.exchange_price(1.0, 300.0) == 144.0);
  CHECK(p.exchange_price(-1.0, 60.0) == 16.0);
}

namespace {
ExogenousRecord sample_record(double demand, double price, double wt, double pv) {
  ExogenousRecord r;
  r.demand = demand;
  r.wholesale_price = price;
  r.wt_output = wt;
  r.pv_output = pv;
  return r;
}
}  // namespace

TEST_CASE("an idle step earns exactly its baseline") {
  Microgrid mg(EnvConfig{});
  StepControls c;
  const auto out = mg.step(sample_record(2.0, 55.0, 0.7, 1.1), c);
  CHECK(out.grid.value() == out.idle_value);
  const auto r = step_reward(out.grid.grid_import, out.grid.price, out.grid.r_mga, out.total_penalties(),
                             out.idle_value, 1);
  CHECK(r.scaled_reward == 0.0);
}

TEST_CASE("with a single actuator moving, marginal and idle baselines coincide") {
  Microgrid mg(EnvConfig{});
  StepControls c;
  c.ess_power = {0.6, 0.0, 0.0};
  const auto out = mg.step(sample_record(2.0, 55.0, 0.7, 1.1), c);
  CHECK(marginal_baseline(out.snapshot, kActuatorLib) == idle_baseline(out.snapshot));
}

TEST_CASE("marginal baselines replay the step with one storage unit zeroed") {
  EnvConfig cfg;
  cfg.initial_charge_fraction = 0.5;
  const auto rec = sample_record(2.2, 73.0, 0.4, 0.9);
  Microgrid mg(cfg);
  StepControls c;
  c.ess_power = {0.7, -0.4, 0.0};
  const auto out = mg.step(rec, c);

  // brute force: step a fresh grid with the agent's action set to zero
  for (std::size_t i = 0; i < 2; ++i) {
    Microgrid replay(cfg);
    StepControls cz = c;
    cz.ess_power[i] = 0.0;
    const auto alt = replay.step(rec, cz);
    CHECK(std::abs(marginal_baseline(out.snapshot, ess_actuator(i)) - alt.grid.value()) < 1e-12);
  }
  Microgrid replay(cfg);
  const auto idle = replay.step(rec, StepControls{});
  CHECK(std::abs(out.idle_value - idle.grid.value()) < 1e-12);
}

TEST_CASE("microgrid step records penalties and charges") {
  EnvConfig cfg;
  cfg.initial_charge_fraction = 0.5;
  Microgrid mg(cfg);
  StepControls c;
  c.ess_power = {1.0, -1.0, 0.5};
  const auto out = mg.step(sample_record(1.5, 40.0, 0.0, 0.0), c);
  for (std::size_t i = 0; i < kEssCount; ++i) {
    const auto& rec = out.ess[i];
    CHECK(rec.charge_before == 1.0);
    CHECK(rec.charge_after == mg.ess_states()[i].charge);
    CHECK(rec.penalties.cpc == cpc_penalty(rec.charge_before, rec.charge_after, cfg.ess[i]));
    CHECK(rec.penalties.cap == 0.0);
  }
  CHECK(out.total_penalties().cpc ==
        doctest::Approx(out.ess[0].penalties.cpc + out.ess[1].penalties.cpc + out.ess[2].penalties.cpc));
  CHECK_THROWS_AS(mg.step(sample_record(1.0, 1.0, 0.0, 0.0),
                          StepControls{{0, 0, 0}, {}, {market::Bid{0, 0.1, 50}}, {}}),
                  std::invalid_argument);
}

TEST_CASE("aggregator volume is bought on the demand side and sold through the auction") {
  EnvConfig cfg;
  Microgrid mg(cfg);
  StepControls c;
  c.offer = {0.3, 50.0};
  c.bids = {market::Bid{0, 0.2, 90.0}, market::Bid{1, 0.2, 40.0}};
  c.xmg_demands = {0.2, 0.2};
  const auto rec = sample_record(1.0, 60.0, 0.0, 0.0);
  const auto out = mg.step(rec, c);
  const auto plain = grid_import(rec.demand + 0.3, 0.0, 0.0, cfg.converters);
  CHECK(out.grid.grid_import == plain.grid_import);
  CHECK(std::abs(out.grid.r_mga - (0.8 * 90.0 * 0.2 + 16.0 * 0.1)) < kTol);
  CHECK(out.grid.auction.allocations[0] == 0.2);
  CHECK(out.grid.auction.allocations[1] == 0.0);
  CHECK(out.xmg_delivered[0] < 0.2);
  CHECK(out.xmg_costs[1] == doctest::Approx(144.0 * 0.2));
}

TEST_CASE("environment configuration validation") {
  EnvConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.initial_charge_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = EnvConfig{};
  cfg.ess[0].rte_efficiency = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = EnvConfig{};
  std::swap(cfg.ess[0], cfg.ess[1]);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = EnvConfig{};
  cfg.converters.inverters.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
