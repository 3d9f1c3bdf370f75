#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mgrid/common.hpp"
#include "mgrid/data/dataset.hpp"
#include "mgrid/forecast/forecast.hpp"
#include "mgrid/harness/config.hpp"
#include "mgrid/harness/report.hpp"
#include "mgrid/harness/run.hpp"
#include "mgrid/harness/sweep.hpp"

using namespace mgrid;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kData = 3, kRuntime = 4 };

/// Flags shared by run, sweep and generate-data. Only flags the user passed
/// are applied; the configuration file is applied afterwards and wins.
struct RunFlags {
  std::string config_path;
  int case_id = 0;
  std::string algorithm, reward_mode, data_path, out;
  std::uint64_t seed = 0;
  int episodes = 0;
  bool desk = false, no_forecast = false, no_traces = false, no_checkpoints = false;
  CLI::Option *case_opt = nullptr, *seed_opt = nullptr, *episodes_opt = nullptr;

  void add(CLI::App& app, bool with_identity) {
    app.add_option("-c,--config", config_path, "YAML configuration file (overrides flags)");
    if (with_identity) {
      case_opt = app.add_option("--case", case_id, "case study: 1 (storage only) or 2 (with trading)");
      app.add_option("--algorithm", algorithm, "ddpg, d3pg, td3, maddpg, mad3pg, matd3, madqn, rbm");
      app.add_option("--reward-mode", reward_mode, "sas, mas-s or mas-mc");
      seed_opt = app.add_option("--seed", seed, "master seed");
    }
    episodes_opt = app.add_option("--episodes", episodes, "number of 168 h episodes (first half trains)");
    app.add_option("--data", data_path, "CSV dataset; synthetic data is generated when omitted");
    app.add_option("-o,--out", out, "output directory");
    app.add_flag("--desk", desk, "smaller networks and batch for single-core runs");
    app.add_flag("--no-forecast", no_forecast, "zero-fill forecast features");
    app.add_flag("--no-traces", no_traces, "skip per-step trace files");
    app.add_flag("--no-checkpoints", no_checkpoints, "skip network checkpoints");
  }

  harness::RunConfig resolve() const {
    harness::RunConfig cfg;
    if (desk) harness::apply_desk_preset(cfg);
    if (case_opt && case_opt->count()) cfg.case_id = case_id;
    if (!algorithm.empty()) cfg.algorithm = harness::parse_algorithm(algorithm);
    if (!reward_mode.empty()) cfg.reward_mode = ma::parse_reward_mode(reward_mode);
    if (seed_opt && seed_opt->count()) cfg.seed = seed;
    if (episodes_opt && episodes_opt->count()) {
      cfg.episodes = episodes;
      cfg.data.synth.weeks = std::max(cfg.data.synth.weeks, episodes);
    }
    if (!data_path.empty()) {
      cfg.data.source = harness::DataSource::Csv;
      cfg.data.path = data_path;
    }
    if (!out.empty()) cfg.output_dir = out;
    if (no_forecast) cfg.forecast.enabled = false;
    if (no_traces) cfg.write_traces = false;
    if (no_checkpoints) cfg.write_checkpoints = false;
    if (!config_path.empty()) harness::apply_yaml_file(cfg, config_path);
    return cfg;
  }
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("invalid seed '" + part + "'");
    }
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  return seeds;
}

int cmd_schema() {
  std::cout << data::kCsvHeader << "\n\n"
            << "timestamp       ISO-8601 hour, YYYY-MM-DDTHH:00:00, strictly hourly and gap-free\n"
            << "demand_mwh      primary microgrid demand for the hour, MWh, >= 0\n"
            << "price_per_mwh   wholesale price, currency/MWh, >= 0 (buy price is capped downstream)\n"
            << "wind_speed_ms   hub-height wind speed, m/s, >= 0\n"
            << "irradiance_wm2  global horizontal irradiance, W/m^2, >= 0\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_allocator();
  CLI::App app{"Microgrid storage and trading control with deep actor-critic agents"};
  app.require_subcommand(1);

  auto* schema = app.add_subcommand("schema", "print the expected dataset CSV header");

  auto* gen = app.add_subcommand("generate-data", "write a seeded synthetic dataset");
  std::string gen_out = "data.csv", gen_config;
  int gen_weeks = 40;
  std::uint64_t gen_seed = 1;
  gen->add_option("-o,--out", gen_out, "output CSV path");
  gen->add_option("--weeks", gen_weeks, "number of weeks");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("-c,--config", gen_config, "YAML configuration; data.synth overrides flags");

  auto* tf = app.add_subcommand("train-forecast", "fit the one-step-ahead forecasters and report held-out error");
  RunFlags tf_flags;
  tf_flags.add(*tf, false);

  auto* run = app.add_subcommand("run", "run one case study");
  RunFlags run_flags;
  run_flags.add(*run, true);
  bool print_config = false;
  run->add_flag("--print-config", print_config, "print the resolved configuration and exit");

  auto* sweep = app.add_subcommand("sweep", "run variants over several seeds in parallel and report");
  RunFlags sweep_flags;
  sweep_flags.add(*sweep, false);
  std::vector<std::string> variants;
  std::string seeds_text = "1,2,3,4,5";
  unsigned workers = 1;
  sweep->add_option("--variant", variants, "algorithm:reward_mode:case, repeatable")->required();
  sweep->add_option("--seeds", seeds_text, "comma-separated seeds");
  sweep->add_option("-j,--workers", workers, "parallel workers");

  auto* report = app.add_subcommand("report", "combine run directories into a table and plots");
  std::vector<std::string> report_runs;
  std::string report_out = "report";
  report->add_option("runs", report_runs, "run directories")->required();
  report->add_option("-o,--out", report_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*schema) return cmd_schema();

    if (*gen) {
      harness::RunConfig cfg;
      cfg.data.synth.weeks = gen_weeks;
      cfg.data.synth.seed = gen_seed;
      if (!gen_config.empty()) harness::apply_yaml_file(cfg, gen_config);
      cfg.env.validate();
      const auto records = data::synth_generate(cfg.data.synth, {cfg.env.wind, cfg.env.solar});
      data::write_csv(gen_out, records);
      std::cout << fmt::format("wrote {} hours to {}\n", records.size(), gen_out);
      return kOk;
    }

    if (*tf) {
      auto cfg = tf_flags.resolve();
      cfg.validate();
      const auto records = harness::load_dataset(cfg);
      const std::size_t split = static_cast<std::size_t>(cfg.train_episodes()) * kHoursPerEpisode;
      forecast::TrainingReport rep;
      const auto model = forecast::train_forecasters(
          records, split, cfg.forecast.model, {cfg.env.wind.farm_capacity(), cfg.env.solar.rated_power}, &rep);
      std::filesystem::create_directories(cfg.output_dir);
      const auto path = cfg.output_dir / "forecaster.txt";
      std::ofstream os(path);
      forecast::save_forecaster(os, model);
      std::cout << fmt::format("{:<8} {:>12} {:>14}\n", "target", "train_rmse", "holdout_rmse");
      for (std::size_t i = 0; i < forecast::kTargetCount; ++i)
        std::cout << fmt::format("{:<8} {:>12.5f} {:>14.5f}\n", forecast::to_string(forecast::kTargets[i]),
                                 rep.train_rmse[i], rep.validation_rmse[i]);
      std::cout << "saved " << path.string() << "\n";
      return kOk;
    }

    if (*run) {
      auto cfg = run_flags.resolve();
      if (print_config) {
        std::cout << harness::dump_yaml(cfg);
        return kOk;
      }
      cfg.validate();
      harness::RunOptions opts;
      opts.on_episode = [&](int ep, const harness::EpisodeMetrics& m) {
        std::cerr << fmt::format("episode {:>4} [{}] adjusted savings {:>12.2f}\n", ep + 1,
                                 m.evaluation ? "eval " : "train", m.adjusted_savings);
      };
      const auto res = harness::run_case(cfg, opts);
      const auto& s = res.summary;
      std::cout << fmt::format(
          "evaluation over {} episodes: raw {:.2f}, adjusted {:.2f}, ESS loss {}, MGA revenue {:.2f}\n",
          s.eval_episodes, s.raw_savings, s.adjusted_savings,
          s.ess_loss_undefined ? std::string("n/a") : fmt::format("{:.2f}%", s.ess_loss_pct), s.mga_revenue);
      std::cout << "outputs in " << cfg.output_dir.string() << "\n";
      return kOk;
    }

    if (*sweep) {
      auto base = sweep_flags.resolve();
      std::vector<harness::Variant> vs;
      for (const auto& v : variants) vs.push_back(harness::parse_variant(v));
      const auto seeds = parse_seeds(seeds_text);
      const std::filesystem::path out = sweep_flags.out.empty() ? "sweep" : sweep_flags.out;
      const auto res = harness::run_sweep(base, vs, seeds, out, workers);
      for (const auto& e : res.errors) std::cerr << "error: " << e << "\n";
      const auto rep = harness::emit_report(res.run_dirs, out / "report");
      for (const auto& e : rep.errors) std::cerr << "warning: " << e << "\n";
      std::cout << rep.table_text;
      return res.errors.empty() ? kOk : kRuntime;
    }

    if (*report) {
      std::vector<std::filesystem::path> dirs(report_runs.begin(), report_runs.end());
      const auto rep = harness::emit_report(dirs, report_out);
      for (const auto& e : rep.errors) std::cerr << "warning: " << e << "\n";
      std::cout << rep.table_text;
      return rep.rows.empty() ? kData : kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
