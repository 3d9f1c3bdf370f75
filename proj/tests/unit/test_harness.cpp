#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mgrid/common.hpp"
#include "mgrid/data/dataset.hpp"
#include "mgrid/env/microgrid.hpp"
#include "mgrid/harness/config.hpp"
#include "mgrid/harness/metrics.hpp"
#include "mgrid/harness/report.hpp"
#include "mgrid/harness/run.hpp"
#include "mgrid/harness/svg.hpp"
#include "mgrid/harness/sweep.hpp"

using namespace mgrid;
using namespace mgrid::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("mgrid-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A two-episode configuration small enough for unit tests.
RunConfig tiny(AlgorithmId algo, ma::RewardMode mode, int case_id, const fs::path& out) {
  RunConfig c;
  c.algorithm = algo;
  c.reward_mode = mode;
  c.case_id = case_id;
  c.episodes = 2;
  c.output_dir = out;
  c.network.actor_hidden = {16};
  c.network.critic_hidden = {16};
  c.agent.batch_size = 16;
  c.agent.warmup_random_steps = 40;
  c.agent.learn_start_step = 40;
  c.agent.buffer_capacity = 1000;
  c.forecast.model.epochs = 3;
  c.forecast.model.hidden_units = 8;
  c.data.synth.weeks = 2;
  return c;
}

StepLog log_with(double r_in, double r_mga, double idle, double cpc, double sdc, double cap) {
  StepLog s;
  s.r_in = r_in;
  s.r_mga = r_mga;
  s.idle_value = idle;
  s.mga_idle_value = idle;
  s.cpc = cpc;
  s.sdc = sdc;
  s.cap = cap;
  return s;
}

}  // namespace

TEST_CASE("algorithm and variant names parse") {
  CHECK(parse_algorithm("matd3") == AlgorithmId::Matd3);
  CHECK(to_string(AlgorithmId::Mad3pg) == "mad3pg");
  CHECK_THROWS_AS(parse_algorithm("ppo"), ConfigError);
  CHECK(is_multi_agent(AlgorithmId::Madqn));
  CHECK_FALSE(is_multi_agent(AlgorithmId::Td3));

  const auto v = parse_variant("matd3:mas-mc:2");
  CHECK(v.algorithm == AlgorithmId::Matd3);
  CHECK(v.reward_mode == ma::RewardMode::MasMc);
  CHECK(v.case_id == 2);
  CHECK(run_name(v, 4) == "matd3-mas-mc-case2-seed4");
  CHECK_THROWS_AS(parse_variant("ddpg:sas"), ConfigError);
  CHECK_THROWS_AS(parse_variant("ddpg:sas:3"), ConfigError);
  CHECK_THROWS_AS(parse_variant("ddpg:solo:1"), ConfigError);
}

TEST_CASE("configuration errors are enumerated together") {
  RunConfig c;
  CHECK(c.validation_errors().empty());

  c.algorithm = AlgorithmId::Maddpg;
  c.reward_mode = ma::RewardMode::Sas;
  c.episodes = 1;
  c.case_id = 3;
  const auto errs = c.validation_errors();
  CHECK(errs.size() >= 3);
  CHECK_THROWS_AS(c.validate(), ConfigError);

  RunConfig rbm2;
  rbm2.algorithm = AlgorithmId::Rbm;
  rbm2.case_id = 2;
  CHECK_FALSE(rbm2.validation_errors().empty());
  RunConfig dqn2;
  dqn2.algorithm = AlgorithmId::Madqn;
  dqn2.reward_mode = ma::RewardMode::MasS;
  CHECK(dqn2.validation_errors().empty());
  dqn2.case_id = 2;
  CHECK_FALSE(dqn2.validation_errors().empty());

  RunConfig rbm_any;
  rbm_any.algorithm = AlgorithmId::Rbm;
  rbm_any.reward_mode = ma::RewardMode::MasMc;
  CHECK(rbm_any.validation_errors().empty());

  RunConfig rainbow;
  rainbow.algorithm = AlgorithmId::Marainbow;
  rainbow.reward_mode = ma::RewardMode::MasS;
  CHECK_FALSE(rainbow.validation_errors().empty());

  RunConfig short_data;
  short_data.episodes = 6;
  short_data.data.synth.weeks = 2;
  CHECK(short_data.validation_errors().empty());
  CHECK(load_dataset(short_data).size() == 6u * 168u);

  RunConfig csv;
  csv.data.source = DataSource::Csv;
  CHECK_FALSE(csv.validation_errors().empty());
}

TEST_CASE("YAML overrides apply on top of defaults and reject unknown keys") {
  RunConfig c;
  apply_yaml(c, "algorithm: td3\nseed: 9\nepisodes: 10\nagent:\n  batch_size: 32\nnetwork:\n  actor_hidden: [8, 4]\n");
  CHECK(c.algorithm == AlgorithmId::Td3);
  CHECK(c.seed == 9);
  CHECK(c.episodes == 10);
  CHECK(c.agent.batch_size == 32);
  CHECK(c.network.actor_hidden == std::vector<std::size_t>{8, 4});
  CHECK(c.network.critic_hidden == std::vector<std::size_t>{128, 128});

  RunConfig d;
  CHECK_THROWS_AS(apply_yaml(d, "colour: blue\n"), ConfigError);
  CHECK_THROWS_AS(apply_yaml(d, "agent:\n  batch: 3\n"), ConfigError);
  CHECK_THROWS_AS(apply_yaml(d, "episodes: many\n"), ConfigError);
  CHECK_THROWS_AS(apply_yaml(d, "algorithm: ppo\n"), ConfigError);
  CHECK_THROWS_AS(apply_yaml(d, "env: 3\n"), ConfigError);
  CHECK_THROWS_AS(apply_yaml(d, "key: [unclosed\n"), ConfigError);
  CHECK_THROWS_AS(apply_yaml_file(d, "/nonexistent/cfg.yaml"), ConfigError);
}

TEST_CASE("dumped configuration round-trips") {
  RunConfig c;
  c.case_id = 2;
  c.algorithm = AlgorithmId::Mad3pg;
  c.reward_mode = ma::RewardMode::MasMc;
  c.seed = 123;
  c.env.xmg_count = 3;
  c.env.prices.feed_in_tariff = 17.5;
  c.agent.discount = 0.95;
  c.network.noisy = false;
  c.forecast.enabled = false;
  c.data.synth.price_noise_std = 2.25;
  const auto text = dump_yaml(c);
  RunConfig back;
  apply_yaml(back, text);
  CHECK(dump_yaml(back) == text);
  CHECK(back.env.xmg_count == 3);
  CHECK(back.agent.discount == 0.95);
}

TEST_CASE("episode metrics aggregate the step terms") {
  std::vector<StepLog> steps{log_with(-100.0, 0.0, -110.0, 1.0, 0.5, 2.0), log_with(-50.0, 4.0, -60.0, 0.5, 0.0, 0.0),
                             log_with(-80.0, 0.0, -75.0, 0.0, 0.25, 1.0)};
  steps[1].mga_idle_value = -57.0;
  const auto m = compute_metrics(steps, 3, true);
  // savings per step: 10, 14, -5
  CHECK(m.raw_savings == doctest::Approx(19.0));
  CHECK(m.cpc == doctest::Approx(1.5));
  CHECK(m.sdc == doctest::Approx(0.75));
  CHECK(m.cap == doctest::Approx(3.0));
  CHECK(m.adjusted_savings == doctest::Approx(16.75));
  CHECK(m.reward == doctest::Approx(13.75));
  CHECK(m.mga_revenue == doctest::Approx(4.0));
  CHECK(m.mga_net == doctest::Approx(10.0 + 11.0 - 5.0));
  CHECK(m.ess_loss_pct == doctest::Approx(100.0 * 2.25 / 19.0));
  CHECK_FALSE(m.ess_loss_undefined);
  CHECK(m.mga_share_pct == doctest::Approx(100.0 * 4.0 / 16.75));
  CHECK(m.episode == 3);
  CHECK(m.evaluation);
  CHECK(m.adjusted_savings <= m.raw_savings);
}

TEST_CASE("an idle run has zero savings and an undefined ESS loss") {
  std::vector<StepLog> steps(168, log_with(-90.0, 0.0, -90.0, 0.0, 0.0, 0.0));
  const auto m = compute_metrics(steps, 0, false);
  CHECK(m.raw_savings == 0.0);
  CHECK(m.adjusted_savings == 0.0);
  CHECK(m.ess_loss_pct == 0.0);
  CHECK(m.ess_loss_undefined);
}

TEST_CASE("aggregator share matches a reported example") {
  double loss = 0, share = 0;
  bool undefined = false;
  fill_percentages(200.0, 186.00, 144.68, loss, undefined, share);
  CHECK(std::abs(std::round(100.0 * share) / 100.0 - 77.78) < 1e-9);
  CHECK(loss == doctest::Approx(7.0));
}

TEST_CASE("summaries include only the evaluation window") {
  std::vector<EpisodeMetrics> eps(6);
  for (int i = 0; i < 6; ++i) {
    eps[static_cast<std::size_t>(i)].episode = i;
    eps[static_cast<std::size_t>(i)].evaluation = i >= 3;
    eps[static_cast<std::size_t>(i)].raw_savings = 1000.0 * (i + 1);
    eps[static_cast<std::size_t>(i)].adjusted_savings = 100.0 * (i + 1);
  }
  const auto s = summarise(eps);
  CHECK(s.eval_episodes == 3);
  CHECK(s.raw_savings == doctest::Approx(4000.0 + 5000.0 + 6000.0));
  CHECK(s.adjusted_savings == doctest::Approx(1500.0));
}

TEST_CASE("relative comparison and smoothing") {
  CHECK(*vs_reference_pct(110.0, 100.0) == doctest::Approx(10.0));
  CHECK(*vs_reference_pct(100.0, 100.0) == 0.0);
  CHECK(*vs_reference_pct(50.0, -100.0) == doctest::Approx(-150.0));
  CHECK_FALSE(vs_reference_pct(1.0, 0.0).has_value());

  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7};
  const auto s = trailing_mean(v, 5);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 1.5);
  CHECK(s[4] == 3.0);
  CHECK(s[6] == 5.0);
}

TEST_CASE("SVG rendering depends only on the data") {
  LinePlot p{"t", "x", "y", {{"a", {0, 1, 2}, {1, 3, 2}}, {"b", {0, 2}, {0, -1}}}};
  const auto a = render_svg(p);
  CHECK(a == render_svg(p));
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.find("</svg>") != std::string::npos);
  p.series[0].y[1] = 4;
  CHECK(render_svg(p) != a);
}

TEST_CASE("a two-episode run emits every declared file") {
  const auto out = scratch("smoke");
  auto cfg = tiny(AlgorithmId::Ddpg, ma::RewardMode::Sas, 1, out / "run");
  const auto r = run_case(cfg);
  for (const char* f : {"config.yaml", "metrics.csv", "summary.csv", "train_log.csv", "steps.csv"})
    CHECK_MESSAGE(fs::exists(out / "run" / f), f);
  CHECK(fs::exists(out / "run" / "checkpoints" / "global-actor.txt"));
  CHECK(fs::exists(out / "run" / "checkpoints" / "forecaster.txt"));
  CHECK(r.steps.size() == 2u * 168u);
  REQUIRE(r.episodes.size() == 2);
  CHECK_FALSE(r.episodes[0].evaluation);
  CHECK(r.episodes[1].evaluation);
  CHECK(r.summary.eval_episodes == 1);
  CHECK(r.summary.adjusted_savings == doctest::Approx(r.episodes[1].adjusted_savings));

  const auto metrics = read_csv_table(out / "run" / "metrics.csv");
  CHECK(metrics.rows.size() == 2);
  const auto steps = read_csv_table(out / "run" / "steps.csv");
  CHECK(steps.rows.size() == 336);

  RunConfig reloaded;
  apply_yaml_file(reloaded, out / "run" / "config.yaml");
  CHECK(dump_yaml(reloaded) == dump_yaml(cfg));
}

TEST_CASE("case 2 runs log auction rows") {
  const auto out = scratch("case2");
  auto cfg = tiny(AlgorithmId::Maddpg, ma::RewardMode::MasMc, 2, out / "run");
  cfg.env.xmg_count = 2;
  cfg.write_checkpoints = false;
  const auto r = run_case(cfg);
  CHECK(fs::exists(out / "run" / "auction.csv"));
  CHECK(r.auction.size() == 2u * 336u);
  for (const auto& a : r.auction) {
    CHECK(a.filled >= 0.0);
    CHECK(a.filled <= a.volume + 1e-12);
  }
  for (const auto& s : r.steps) {
    CHECK(s.sold >= 0.0);
    CHECK(s.sold <= s.offer_volume + 1e-12);
  }
}

TEST_CASE("the same configuration and seed reproduce every byte") {
  const auto out = scratch("determinism");
  for (auto [algo, mode, case_id] : {std::tuple{AlgorithmId::Td3, ma::RewardMode::Sas, 1},
                                     std::tuple{AlgorithmId::Matd3, ma::RewardMode::MasMc, 2},
                                     std::tuple{AlgorithmId::Madqn, ma::RewardMode::MasS, 1}}) {
    auto a = tiny(algo, mode, case_id, out / "a");
    auto b = tiny(algo, mode, case_id, out / "b");
    a.env.xmg_count = b.env.xmg_count = 2;
    run_case(a);
    run_case(b);
    for (const char* f : {"metrics.csv", "summary.csv", "steps.csv", "train_log.csv"}) {
      INFO(to_string(algo), " ", f);
      CHECK(slurp(out / "a" / f) == slurp(out / "b" / f));
    }
    auto c = tiny(algo, mode, case_id, out / "c");
    c.env.xmg_count = 2;
    c.seed = 2;
    run_case(c);
    CHECK(slurp(out / "a" / "steps.csv") != slurp(out / "c" / "steps.csv"));
  }
}

TEST_CASE("the rule-based controller stays passive when RES never covers demand") {
  const auto out = scratch("rbm");
  const auto csv = out / "calm.csv";
  {
    std::ofstream os(csv);
    os << data::kCsvHeader << "\n";
    const auto start = data::default_start_hour();
    for (int i = 0; i < 2 * 168; ++i)
      os << data::format_timestamp(start + i) << ",3.0," << (30 + i % 24) << ",0,0\n";
  }
  auto cfg = tiny(AlgorithmId::Rbm, ma::RewardMode::Sas, 1, out / "run");
  cfg.data.source = DataSource::Csv;
  cfg.data.path = csv;
  const auto r = run_case(cfg);
  for (const auto& s : r.steps) {
    for (double x : s.ess_power) CHECK(x == 0.0);
    CHECK(s.savings() == doctest::Approx(0.0));
  }
  CHECK(r.summary.raw_savings == doctest::Approx(0.0));
  CHECK(r.summary.ess_loss_undefined);
}

TEST_CASE("datasets shorter than the run are rejected") {
  const auto out = scratch("short");
  const auto csv = out / "short.csv";
  {
    std::ofstream os(csv);
    os << data::kCsvHeader << "\n";
    for (int i = 0; i < 200; ++i) os << data::format_timestamp(data::default_start_hour() + i) << ",3,40,5,0\n";
  }
  auto cfg = tiny(AlgorithmId::Ddpg, ma::RewardMode::Sas, 1, out / "run");
  cfg.data.source = DataSource::Csv;
  cfg.data.path = csv;
  CHECK_THROWS_AS(load_dataset(cfg), DataError);
}

TEST_CASE("an idle aggregator leaves case 1 dynamics untouched") {
  env::EnvConfig ec;
  env::Microgrid with_market(ec), without(ec);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
  data::SynthConfig sc;
  sc.weeks = 1;
  const auto recs = data::synth_generate(sc, data::Generators{ec.wind, ec.solar});
  for (const auto& rec : recs) {
    env::StepControls a, b;
    for (std::size_t k = 0; k < env::kEssCount; ++k) a.ess_power[k] = b.ess_power[k] = u(rng);
    for (std::size_t j = 0; j < 3; ++j) {
      a.bids.push_back({j, 0.2 * pos(rng), 100.0 * pos(rng)});
      a.xmg_demands.push_back(a.bids.back().volume);
    }
    const auto oa = with_market.step(rec, a);
    const auto ob = without.step(rec, b);
    CHECK(oa.grid.r_in == ob.grid.r_in);
    CHECK(oa.grid.r_mga == 0.0);
    CHECK(oa.grid.grid_import == ob.grid.grid_import);
    CHECK(oa.idle_value == ob.idle_value);
    for (std::size_t k = 0; k < env::kEssCount; ++k) CHECK(oa.ess[k].charge_after == ob.ess[k].charge_after);
    CHECK(oa.total_penalties().cpc == ob.total_penalties().cpc);
  }
}

TEST_CASE("reports compare runs against DDPG and survive missing traces") {
  const auto out = scratch("report");
  auto ddpg = tiny(AlgorithmId::Ddpg, ma::RewardMode::Sas, 1, out / "ddpg");
  auto mas = tiny(AlgorithmId::Maddpg, ma::RewardMode::MasS, 1, out / "maddpg");
  ddpg.write_checkpoints = mas.write_checkpoints = false;
  mas.write_traces = false;
  const auto rd = run_case(ddpg);
  const auto rm = run_case(mas);

  SUBCASE("single run") {
    const auto res = emit_report({out / "maddpg"}, out / "one");
    REQUIRE(res.rows.size() == 1);
    CHECK_FALSE(res.rows[0].vs_ddpg_pct.has_value());
    const auto t = read_csv_table(out / "one" / "report.csv");
    CHECK(t.rows[0][*t.column("vs_ddpg_pct")] == "-");
    // no traces: the control plot fails alone
    bool control_error = false;
    for (const auto& e : res.errors) control_error |= e.find("control_trace") != std::string::npos;
    CHECK(control_error);
    CHECK(fs::exists(out / "one" / "reward_curves.svg"));
    CHECK(fs::exists(out / "one" / "cumulative_savings.svg"));
    const auto only_ddpg = emit_report({out / "ddpg"}, out / "one-ddpg");
    CHECK_FALSE(only_ddpg.rows[0].vs_ddpg_pct.has_value());
  }
  SUBCASE("two runs") {
    const auto res = emit_report({out / "ddpg", out / "maddpg"}, out / "two");
    REQUIRE(res.rows.size() == 2);
    CHECK(*res.rows[0].vs_ddpg_pct == 0.0);
    const double expected =
        100.0 * (rm.summary.adjusted_savings - rd.summary.adjusted_savings) / rd.summary.adjusted_savings;
    CHECK(*res.rows[1].vs_ddpg_pct == doctest::Approx(expected).epsilon(1e-9));
    CHECK(fs::exists(out / "two" / "control_trace.svg"));
    const auto again = emit_report({out / "ddpg", out / "maddpg"}, out / "two-again");
    for (const char* f : {"report.csv", "report.txt", "reward_curves.svg", "cumulative_savings.svg"})
      CHECK(slurp(out / "two" / f) == slurp(out / "two-again" / f));
  }
  SUBCASE("unreadable run") {
    const auto res = emit_report({out / "ddpg", out / "nothing-here"}, out / "bad");
    CHECK(res.rows.size() == 1);
    CHECK_FALSE(res.errors.empty());
    CHECK(fs::exists(out / "bad" / "report.txt"));
  }
}

TEST_CASE("parallel sweeps match sequential runs") {
  const auto out = scratch("sweep");
  auto base = tiny(AlgorithmId::Ddpg, ma::RewardMode::Sas, 1, out);
  base.write_checkpoints = false;
  base.write_traces = false;
  const std::vector<Variant> variants{{AlgorithmId::Ddpg, ma::RewardMode::Sas, 1}};
  const auto sw = run_sweep(base, variants, {1, 2}, out / "par", 2);
  REQUIRE(sw.errors.empty());
  REQUIRE(sw.run_dirs.size() == 2);
  auto solo = base;
  solo.seed = 2;
  solo.output_dir = out / "solo";
  run_case(solo);
  CHECK(slurp(out / "par" / "ddpg-sas-case1-seed2" / "metrics.csv") == slurp(out / "solo" / "metrics.csv"));
  CHECK_THROWS_AS(run_sweep(base, {{AlgorithmId::Ddpg, ma::RewardMode::MasS, 1}}, {1}, out / "bad", 1), ConfigError);
}
