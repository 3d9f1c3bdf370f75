#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mgrid/harness/config.hpp"
#include "mgrid/harness/run.hpp"

namespace mgrid::harness {

struct Variant {
  AlgorithmId algorithm = AlgorithmId::Ddpg;
  ma::RewardMode reward_mode = ma::RewardMode::Sas;
  int case_id = 1;
};

/// Parses "algorithm:reward_mode:case", e.g. "matd3:mas-mc:2".
Variant parse_variant(const std::string& text);
std::string run_name(const Variant& v, std::uint64_t seed);

struct SweepOutcome {
  std::vector<std::filesystem::path> run_dirs;  // successful runs, in job order
  std::vector<RunSummary> summaries;
  std::vector<std::string> errors;
};

/// Runs every (variant, seed) pair below out_dir on `workers` threads. Each
/// job owns its whole run; nothing mutable is shared between jobs.
SweepOutcome run_sweep(const RunConfig& base, const std::vector<Variant>& variants,
                       const std::vector<std::uint64_t>& seeds, const std::filesystem::path& out_dir,
                       unsigned workers);

}  // namespace mgrid::harness
