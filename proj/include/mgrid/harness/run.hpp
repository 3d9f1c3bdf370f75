#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mgrid/harness/config.hpp"
#include "mgrid/harness/metrics.hpp"

namespace mgrid::harness {

struct AuctionRow {
  std::size_t t = 0;
  std::string agent;
  double demand = 0.0;
  double volume = 0.0;
  double price = 0.0;
  double filled = 0.0;
};

struct TrainLogRow {
  int episode = 0;
  std::string agent;
  std::size_t updates = 0;
  double critic_loss = 0.0;  // mean over updates
  double mean_target = 0.0;
  int skipped = 0;
};

struct RunResult {
  RunConfig config;
  std::vector<StepLog> steps;
  std::vector<EpisodeMetrics> episodes;
  RunSummary summary;
  std::vector<AuctionRow> auction;
  std::vector<TrainLogRow> train_log;
  std::vector<std::string> agent_ids;
};

/// Loads or generates the exogenous series of a run and checks it covers
/// every episode.
std::vector<env::ExogenousRecord> load_dataset(const RunConfig& cfg);

struct RunOptions {
  bool write_outputs = true;
  /// Called after each episode with (episode index, metrics).
  std::function<void(int, const EpisodeMetrics&)> on_episode;
};

/// Runs a full case study: the agents learn online over all episodes, and
/// metrics are aggregated over the second half.
RunResult run_case(const RunConfig& cfg, const RunOptions& options = {});

/// Writes resolved config, metrics, summary, traces and the training log.
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir);

}  // namespace mgrid::harness
