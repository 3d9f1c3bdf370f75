#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mgrid::harness {

/// A CSV file held column-wise.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
};

/// Throws std::runtime_error when the file is missing or ragged.
CsvTable read_csv_table(const std::filesystem::path& path);

struct ReportRow {
  std::string run;
  std::string algorithm;
  int case_id = 0;
  std::string reward_mode;
  std::string seed;
  double raw_savings = 0.0;
  double adjusted_savings = 0.0;
  std::optional<double> vs_ddpg_pct;
  double ess_loss_pct = 0.0;
  bool ess_loss_undefined = false;
  double mga_revenue = 0.0;
  double mga_share_pct = 0.0;
};

struct ReportResult {
  std::vector<ReportRow> rows;
  std::vector<std::filesystem::path> plots;
  std::vector<std::string> errors;  // one entry per run or plot that could not be produced
  std::string table_text;
};

/// Reads each run's summary and traces and writes report.txt, report.csv and
/// SVG plots into out_dir. A run or plot that fails is reported in `errors`
/// without stopping the others.
ReportResult emit_report(const std::vector<std::filesystem::path>& run_dirs, const std::filesystem::path& out_dir);

}  // namespace mgrid::harness
