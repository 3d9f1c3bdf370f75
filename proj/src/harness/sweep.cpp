#include "mgrid/harness/sweep.hpp"

#include <fmt/format.h>

#include <atomic>
#include <optional>
#include <sstream>
#include <thread>

#include "mgrid/common.hpp"

namespace mgrid::harness {

Variant parse_variant(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  if (parts.size() != 3) throw ConfigError("variant '" + text + "' must look like algorithm:reward_mode:case");
  Variant v;
  v.algorithm = parse_algorithm(parts[0]);
  v.reward_mode = ma::parse_reward_mode(parts[1]);
  if (parts[2] != "1" && parts[2] != "2") throw ConfigError("variant '" + text + "': case must be 1 or 2");
  v.case_id = parts[2] == "1" ? 1 : 2;
  return v;
}

std::string run_name(const Variant& v, std::uint64_t seed) {
  return fmt::format("{}-{}-case{}-seed{}", to_string(v.algorithm), ma::to_string(v.reward_mode), v.case_id, seed);
}

SweepOutcome run_sweep(const RunConfig& base, const std::vector<Variant>& variants,
                       const std::vector<std::uint64_t>& seeds, const std::filesystem::path& out_dir,
                       unsigned workers) {
  struct Job {
    RunConfig cfg;
  };
  std::vector<Job> jobs;
  for (const auto& v : variants)
    for (auto seed : seeds) {
      RunConfig c = base;
      c.algorithm = v.algorithm;
      c.reward_mode = v.reward_mode;
      c.case_id = v.case_id;
      c.seed = seed;
      c.output_dir = out_dir / run_name(v, seed);
      const auto errs = c.validation_errors();
      if (!errs.empty()) {
        std::string msg = run_name(v, seed) + ": invalid configuration";
        for (const auto& e : errs) msg += "; " + e;
        throw ConfigError(msg);
      }
      jobs.push_back({c});
    }

  std::vector<std::optional<RunSummary>> results(jobs.size());
  std::vector<std::string> job_errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_case(jobs[i].cfg).summary;
      } catch (const std::exception& e) {
        job_errors[i] = jobs[i].cfg.output_dir.filename().string() + ": " + e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepOutcome out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (results[i]) {
      out.run_dirs.push_back(jobs[i].cfg.output_dir);
      out.summaries.push_back(*results[i]);
    } else {
      out.errors.push_back(job_errors[i]);
    }
  }
  return out;
}

}  // namespace mgrid::harness
