#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "mgrid/common.hpp"
#include "mgrid/data/dataset.hpp"
#include "mgrid/harness/config.hpp"
#include "mgrid/harness/report.hpp"
#include "mgrid/harness/run.hpp"
#include "mgrid/market/auction.hpp"

namespace py = pybind11;
using namespace mgrid;

namespace {

harness::RunConfig resolve(const std::string& yaml, const std::optional<std::string>& output_dir) {
  harness::RunConfig cfg;
  if (!yaml.empty()) harness::apply_yaml(cfg, yaml);
  if (output_dir) cfg.output_dir = *output_dir;
  return cfg;
}

py::dict summary_dict(const harness::RunSummary& s) {
  py::dict d;
  d["eval_episodes"] = s.eval_episodes;
  d["raw_savings"] = s.raw_savings;
  d["adjusted_savings"] = s.adjusted_savings;
  d["cpc"] = s.cpc;
  d["sdc"] = s.sdc;
  d["cap"] = s.cap;
  d["mga_revenue"] = s.mga_revenue;
  d["mga_net"] = s.mga_net;
  d["ess_loss_pct"] = s.ess_loss_pct;
  d["ess_loss_undefined"] = s.ess_loss_undefined;
  d["mga_share_pct"] = s.mga_share_pct;
  return d;
}

py::dict episode_dict(const harness::EpisodeMetrics& m) {
  py::dict d;
  d["episode"] = m.episode;
  d["evaluation"] = m.evaluation;
  d["raw_savings"] = m.raw_savings;
  d["adjusted_savings"] = m.adjusted_savings;
  d["cpc"] = m.cpc;
  d["sdc"] = m.sdc;
  d["cap"] = m.cap;
  d["mga_revenue"] = m.mga_revenue;
  d["mga_net"] = m.mga_net;
  d["reward"] = m.reward;
  return d;
}

py::dict run(const std::string& yaml, const std::optional<std::string>& output_dir) {
  auto cfg = resolve(yaml, output_dir);
  harness::RunOptions options;
  options.write_outputs = output_dir.has_value();
  harness::RunResult result;
  {
    py::gil_scoped_release release;
    result = harness::run_case(cfg, options);
  }
  py::list episodes;
  for (const auto& m : result.episodes) episodes.append(episode_dict(m));
  py::dict out;
  out["summary"] = summary_dict(result.summary);
  out["episodes"] = episodes;
  out["agents"] = result.agent_ids;
  out["config"] = harness::dump_yaml(result.config);
  return out;
}

py::dict auction(double sell_volume, double reserve_price, const std::vector<std::pair<double, double>>& bids,
                 double price_cap, double feed_in_tariff) {
  std::vector<market::Bid> b;
  for (std::size_t i = 0; i < bids.size(); ++i) b.push_back({i, bids[i].first, bids[i].second});
  const env::PriceSchedule prices{.price_cap = price_cap, .feed_in_tariff = feed_in_tariff};
  prices.validate();
  for (const auto& bid : b) market::validate_bid(bid, prices);
  const auto o = market::run_auction({sell_volume, reserve_price}, b, prices);
  py::list trace;
  for (const auto& f : o.trace) trace.append(py::make_tuple(f.agent_id, f.volume, f.price));
  py::dict d;
  d["mga_revenue"] = o.mga_revenue;
  d["allocations"] = o.allocations;
  d["unsold"] = o.unsold;
  d["trace"] = trace;
  return d;
}

py::dict synth(std::uint64_t seed, int weeks) {
  data::SynthConfig sc;
  sc.seed = seed;
  sc.weeks = weeks;
  sc.validate();
  const auto recs = data::synth_generate(sc, data::Generators{});
  std::vector<std::string> ts;
  std::vector<double> demand, price, wind, irr, wt, pv;
  for (const auto& r : recs) {
    ts.push_back(data::format_timestamp(r.timestamp));
    demand.push_back(r.demand);
    price.push_back(r.wholesale_price);
    wind.push_back(r.wind_speed);
    irr.push_back(r.irradiance);
    wt.push_back(r.wt_output);
    pv.push_back(r.pv_output);
  }
  py::dict d;
  d["timestamp"] = ts;
  d["demand"] = demand;
  d["price"] = price;
  d["wind_speed"] = wind;
  d["irradiance"] = irr;
  d["wt_output"] = wt;
  d["pv_output"] = pv;
  return d;
}

py::dict make_report(const std::vector<std::filesystem::path>& run_dirs, const std::filesystem::path& out_dir) {
  const auto r = harness::emit_report(run_dirs, out_dir);
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict d;
    d["algorithm"] = row.algorithm;
    d["case"] = row.case_id;
    d["reward_mode"] = row.reward_mode;
    d["seed"] = row.seed;
    d["raw_savings"] = row.raw_savings;
    d["adjusted_savings"] = row.adjusted_savings;
    d["vs_ddpg_pct"] = row.vs_ddpg_pct ? py::cast(*row.vs_ddpg_pct) : py::none();
    d["ess_loss_pct"] = row.ess_loss_pct;
    d["mga_revenue"] = row.mga_revenue;
    d["mga_share_pct"] = row.mga_share_pct;
    rows.append(d);
  }
  py::dict out;
  out["rows"] = rows;
  out["errors"] = r.errors;
  out["table"] = r.table_text;
  return out;
}

}  // namespace

PYBIND11_MODULE(_mgrid, m) {
  configure_allocator();
  m.doc() = "Microgrid storage and trading control with deep actor-critic agents";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_IOError);

  m.def("default_config", [] { return harness::dump_yaml(harness::RunConfig{}); },
        "Fully resolved default configuration as YAML.");
  m.def(
      "config_errors",
      [](const std::string& yaml) { return resolve(yaml, std::nullopt).validation_errors(); },
      py::arg("config") = "", "Every constraint the configuration violates; empty when valid.");
  m.def("run", &run, py::arg("config") = "", py::arg("output_dir") = py::none(),
        "Run one case study from a YAML configuration. Files are written only when output_dir is given.");
  m.def("run_auction", &auction, py::arg("sell_volume"), py::arg("reserve_price"), py::arg("bids"),
        py::arg("price_cap") = 144.0, py::arg("feed_in_tariff") = 16.0,
        "Clear one auction step; bids are (volume, price) pairs indexed by position.");
  m.def("synth_generate", &synth, py::arg("seed") = 1, py::arg("weeks") = 1,
        "Seeded synthetic hourly series as columns.");
  m.def("report", &make_report, py::arg("run_dirs"), py::arg("out_dir"),
        "Aggregate run directories into report.txt, report.csv and plots.");
}
