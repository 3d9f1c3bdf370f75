#include "mgrid/harness/report.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mgrid/harness/metrics.hpp"
#include "mgrid/harness/svg.hpp"

namespace mgrid::harness {

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
  const auto c = column(name);
  if (!c) throw std::runtime_error("missing column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(std::stod(r[*c]));
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  os << text;
}

std::string money_k(double v) { return fmt::format("{:.3f}", v / 1000.0); }

}  // namespace

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing file '" + path.string() + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file '" + path.string() + "'");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size())
      throw std::runtime_error(fmt::format("{}:{}: expected {} fields, found {}", path.string(), lineno,
                                           t.header.size(), row.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

ReportResult emit_report(const std::vector<std::filesystem::path>& run_dirs, const std::filesystem::path& out_dir) {
  ReportResult res;
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> ok_dirs;

  for (const auto& dir : run_dirs) {
    try {
      const auto t = read_csv_table(dir / "summary.csv");
      if (t.rows.empty()) throw std::runtime_error("summary.csv has no rows");
      const auto& r = t.rows.front();
      auto col = [&](const std::string& n) -> const std::string& {
        const auto c = t.column(n);
        if (!c) throw std::runtime_error("summary.csv lacks column '" + n + "'");
        return r[*c];
      };
      ReportRow row;
      row.run = dir.filename().string();
      if (row.run.empty()) row.run = dir.parent_path().filename().string();
      row.algorithm = col("algorithm");
      row.case_id = std::stoi(col("case"));
      row.reward_mode = col("reward_mode");
      row.seed = col("seed");
      row.raw_savings = std::stod(col("raw_savings"));
      row.adjusted_savings = std::stod(col("adjusted_savings"));
      row.ess_loss_pct = std::stod(col("ess_loss_pct"));
      row.ess_loss_undefined = col("ess_loss_undefined") == "1";
      row.mga_revenue = std::stod(col("mga_revenue"));
      row.mga_share_pct = std::stod(col("mga_share_pct"));
      res.rows.push_back(row);
      ok_dirs.push_back(dir);
    } catch (const std::exception& e) {
      res.errors.push_back("run " + dir.string() + ": " + e.what());
    }
  }

  // reference: a DDPG run of the same case, preferring the same seed; a lone
  // run has nothing to be compared against
  for (auto& row : res.rows) {
    if (res.rows.size() < 2) break;
    const ReportRow* ref = nullptr;
    for (const auto& cand : res.rows)
      if (cand.algorithm == "ddpg" && cand.case_id == row.case_id && cand.seed == row.seed) ref = &cand;
    if (!ref)
      for (const auto& cand : res.rows)
        if (cand.algorithm == "ddpg" && cand.case_id == row.case_id) {
          ref = &cand;
          break;
        }
    if (ref) row.vs_ddpg_pct = vs_reference_pct(row.adjusted_savings, ref->adjusted_savings);
  }

  std::string csv = "run,algorithm,case,reward_mode,seed,sav_k,adj_k,vs_ddpg_pct,ess_loss_pct,mga_k,mga_pct\n";
  std::string txt = fmt::format("{:<32} {:<9} {:>4} {:<8} {:>6} {:>10} {:>10} {:>9} {:>9} {:>9} {:>8}\n", "run",
                                "algorithm", "case", "reward", "seed", "Sav.(k)", "Adj.(k)", "vs DDPG", "ESS Loss",
                                "MGA(k)", "MGA%");
  for (const auto& r : res.rows) {
    const std::string vs = r.vs_ddpg_pct ? fmt::format("{:.2f}", *r.vs_ddpg_pct) : "-";
    const std::string loss = r.ess_loss_undefined ? "-" : fmt::format("{:.2f}", r.ess_loss_pct);
    const bool trading = r.case_id == 2;
    const std::string mga = trading ? money_k(r.mga_revenue) : "-";
    const std::string share = trading ? fmt::format("{:.2f}", r.mga_share_pct) : "-";
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.run, r.algorithm, r.case_id, r.reward_mode, r.seed,
                       money_k(r.raw_savings), money_k(r.adjusted_savings), vs, loss, mga, share);
    txt += fmt::format("{:<32} {:<9} {:>4} {:<8} {:>6} {:>10} {:>10} {:>9} {:>9} {:>9} {:>8}\n", r.run, r.algorithm,
                       r.case_id, r.reward_mode, r.seed, money_k(r.raw_savings), money_k(r.adjusted_savings), vs, loss,
                       mga, share);
  }
  res.table_text = txt;
  write_text(out_dir / "report.csv", csv);
  write_text(out_dir / "report.txt", txt);

  auto emit = [&](const std::string& file, auto&& build) {
    try {
      LinePlot p = build();
      const auto path = out_dir / file;
      write_text(path, render_svg(p));
      res.plots.push_back(path);
    } catch (const std::exception& e) {
      res.errors.push_back("plot " + file + ": " + e.what());
    }
  };

  auto episode_plot = [&](const std::string& column, const std::string& title, const std::string& ylabel) {
    LinePlot p{title, "episode", ylabel, {}};
    if (ok_dirs.empty()) throw std::runtime_error("no readable runs");
    for (std::size_t i = 0; i < ok_dirs.size(); ++i) {
      const auto t = read_csv_table(ok_dirs[i] / "metrics.csv");
      p.series.push_back({res.rows[i].run, t.numbers("episode"), t.numbers(column)});
    }
    return p;
  };
  emit("reward_curves.svg", [&] { return episode_plot("reward_smoothed", "Episode reward (5-episode mean)", "reward"); });
  emit("cumulative_savings.svg",
       [&] { return episode_plot("cumulative_adjusted", "Cumulative adjusted savings", "currency"); });

  emit("control_trace.svg", [&] {
    if (ok_dirs.empty()) throw std::runtime_error("no readable runs");
    const auto t = read_csv_table(ok_dirs.front() / "steps.csv");
    const auto ts = t.numbers("t");
    const std::size_t n = ts.size(), from = n > 168 ? n - 168 : 0;
    auto tail = [&](const std::string& c) {
      auto v = t.numbers(c);
      return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(from), v.end());
    };
    const auto x = tail("t");
    auto demand = tail("demand"), wt = tail("wt"), pv = tail("pv");
    std::vector<double> net(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) net[i] = demand[i] - wt[i] - pv[i];
    return LinePlot{"ESS charge over the final week (" + res.rows.front().run + ")", "hour", "MWh",
                    {{"LIB", x, tail("c_lib")}, {"VRB", x, tail("c_vrb")}, {"SC", x, tail("c_sc")},
                     {"demand - RES", x, net}}};
  });

  emit("trading_trace.svg", [&] {
    for (std::size_t i = 0; i < ok_dirs.size(); ++i) {
      if (res.rows[i].case_id != 2) continue;
      const auto t = read_csv_table(ok_dirs[i] / "auction.csv");
      const auto ts = t.numbers("t");
      const auto filled = t.numbers("filled");
      const auto agent = *t.column("agent");
      const double last = ts.empty() ? 0.0 : ts.back();
      std::map<std::string, Series> by_agent;
      for (std::size_t r = 0; r < ts.size(); ++r) {
        if (ts[r] + 168 <= last) continue;
        auto& s = by_agent[t.rows[r][agent]];
        s.name = t.rows[r][agent];
        s.x.push_back(ts[r]);
        s.y.push_back(filled[r]);
      }
      LinePlot p{"Volume bought from the aggregator, final week (" + res.rows[i].run + ")", "hour", "MWh", {}};
      for (auto& [name, s] : by_agent) p.series.push_back(std::move(s));
      return p;
    }
    throw std::runtime_error("no case 2 run among the inputs");
  });
  return res;
}

}  // namespace mgrid::harness
