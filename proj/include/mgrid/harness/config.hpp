#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mgrid/data/dataset.hpp"
#include "mgrid/env/microgrid.hpp"
#include "mgrid/forecast/forecast.hpp"
#include "mgrid/ma/roles.hpp"
#include "mgrid/rl/hyperparams.hpp"

namespace mgrid::harness {

enum class AlgorithmId { Ddpg, D3pg, Td3, Maddpg, Mad3pg, Matd3, Madqn, Rbm, Marainbow };

std::string_view to_string(AlgorithmId a);
AlgorithmId parse_algorithm(std::string_view s);
bool is_multi_agent(AlgorithmId a);

enum class DataSource { Synthetic, Csv };

struct DataConfig {
  DataSource source = DataSource::Synthetic;
  std::filesystem::path path;  // for Csv
  data::SynthConfig synth;
  bool synth_seed_from_run = true;  // derive the synthetic seed from the run seed
};

struct ForecastSettings {
  bool enabled = true;
  forecast::ForecastConfig model;
};

struct RunConfig {
  int case_id = 1;
  AlgorithmId algorithm = AlgorithmId::Ddpg;
  ma::RewardMode reward_mode = ma::RewardMode::Sas;
  std::uint64_t seed = 1;
  int episodes = 200;  // first half trains, second half is the reporting window
  std::filesystem::path output_dir = "runs/run";
  bool write_traces = true;
  bool write_checkpoints = true;

  env::EnvConfig env;
  rl::AgentHyperparams agent;
  rl::NetworkConfig network;
  ForecastSettings forecast;
  DataConfig data;

  int train_episodes() const { return episodes / 2; }
  std::size_t hours() const { return static_cast<std::size_t>(episodes) * kHoursPerEpisode; }

  /// Every violated constraint, in a stable order. Empty when valid.
  std::vector<std::string> validation_errors() const;
  /// Throws ConfigError listing all violations.
  void validate() const;
};

/// Applies the keys of a YAML document on top of `cfg`. Unknown keys and
/// badly typed values are configuration errors.
void apply_yaml(RunConfig& cfg, const std::string& yaml_text);
void apply_yaml_file(RunConfig& cfg, const std::filesystem::path& path);

/// Fully resolved configuration as YAML; apply_yaml of the result round-trips.
std::string dump_yaml(const RunConfig& cfg);

/// Reduced networks and batch for single-core desk runs.
void apply_desk_preset(RunConfig& cfg);

}  // namespace mgrid::harness
