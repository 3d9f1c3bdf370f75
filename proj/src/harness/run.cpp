#include "mgrid/harness/run.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <random>

#include "mgrid/common.hpp"
#include "mgrid/data/dataset.hpp"
#include "mgrid/forecast/forecast.hpp"
#include "mgrid/ma/groups.hpp"
#include "mgrid/ma/observation.hpp"
#include "mgrid/ma/roles.hpp"
#include "mgrid/market/xmg.hpp"

namespace mgrid::harness {

using nn::Vector;

std::vector<env::ExogenousRecord> load_dataset(const RunConfig& cfg) {
  const data::Generators gen{cfg.env.wind, cfg.env.solar};
  std::vector<env::ExogenousRecord> records;
  if (cfg.data.source == DataSource::Csv) {
    records = data::load_csv(cfg.data.path, gen);
  } else {
    auto synth = cfg.data.synth;
    if (cfg.data.synth_seed_from_run) synth.seed = derive_seed(cfg.seed, "dataset");
    // every series is drawn sequentially, so extra weeks leave the prefix unchanged
    synth.weeks = std::max(synth.weeks, cfg.episodes);
    records = data::synth_generate(synth, gen);
  }
  if (records.size() < cfg.hours())
    throw DataError(DataError::Kind::Schema, 0,
                    fmt::format("dataset holds {} hours but {} episodes need {}", records.size(), cfg.episodes,
                                cfg.hours()));
  records.resize(cfg.hours());
  return records;
}

namespace {

rl::Algorithm learner_family(AlgorithmId a) {
  switch (a) {
    case AlgorithmId::D3pg:
    case AlgorithmId::Mad3pg: return rl::Algorithm::D3pg;
    case AlgorithmId::Td3:
    case AlgorithmId::Matd3: return rl::Algorithm::Td3;
    default: return rl::Algorithm::Ddpg;
  }
}

enum class ControllerKind { ActorCritic, Madqn, Rbm };

ControllerKind controller_kind(AlgorithmId a) {
  if (a == AlgorithmId::Rbm) return ControllerKind::Rbm;
  if (a == AlgorithmId::Madqn) return ControllerKind::Madqn;
  return ControllerKind::ActorCritic;
}

struct Accumulator {
  std::size_t updates = 0;
  double loss = 0.0;
  double target = 0.0;
  int skipped = 0;

  void add(const rl::UpdateStats& s) {
    ++updates;
    loss += s.critic_loss;
    target += s.mean_target;
    skipped += s.skipped_updates;
  }
};

class Simulation {
 public:
  explicit Simulation(const RunConfig& cfg)
      : cfg_(cfg),
        kind_(controller_kind(cfg.algorithm)),
        grid_(cfg.env),
        xmg_rng_(derive_seed(cfg.seed, "xmg-demand")) {
    records_ = load_dataset(cfg_);
    const std::size_t train_hours = static_cast<std::size_t>(cfg_.train_episodes()) * kHoursPerEpisode;
    const std::span<const env::ExogenousRecord> train_span(records_.data(), train_hours);
    norm_ = ma::ObservationNormaliser::fit(train_span, cfg_.env);

    forecasts_.assign(records_.size(), forecast::Forecast{});
    if (cfg_.forecast.enabled && kind_ != ControllerKind::Rbm) {
      auto fc = cfg_.forecast.model;
      fc.seed = derive_seed(cfg_.seed, "forecast");
      forecaster_ = forecast::train_forecasters(records_, train_hours, fc,
                                                {cfg_.env.wind.farm_capacity(), cfg_.env.solar.rated_power});
      forecasts_ = forecast::predict_series(*forecaster_, records_);
    }

    const auto mode = kind_ == ControllerKind::Rbm ? ma::RewardMode::Sas : cfg_.reward_mode;
    agents_ = ma::build_agents(cfg_.case_id, mode, cfg_.case_id == 2 ? cfg_.env.xmg_count : 0);
    if (kind_ == ControllerKind::Rbm) agents_.resize(1);
    primary_schema_ = ma::primary_schema(cfg_.case_id);

    const std::uint64_t learner_seed = derive_seed(cfg_.seed, "learners");
    if (kind_ == ControllerKind::ActorCritic) {
      std::vector<ma::MemberShape> shapes;
      for (const auto& a : agents_) shapes.push_back({a.schema.size(), a.action_dim});
      group_.emplace(learner_family(cfg_.algorithm), shapes, is_multi_agent(cfg_.algorithm), cfg_.agent,
                     cfg_.network, learner_seed);
    } else if (kind_ == ControllerKind::Madqn) {
      chain_.emplace(primary_schema_.size(), env::kEssCount, ma::kDqnActionLevels.size(), cfg_.agent, cfg_.network,
                     learner_seed);
    }
    accum_.resize(agents_.size());
  }

  RunResult run(const RunOptions& options) {
    RunResult result;
    result.config = cfg_;
    for (const auto& a : agents_) result.agent_ids.push_back(a.id);
    grid_.reset();
    market::MgaOffer prev_offer{0.0, cfg_.env.prices.feed_in_tariff};
    std::size_t step = 0;
    const std::vector<double> levels(ma::kDqnActionLevels.begin(), ma::kDqnActionLevels.end());

    for (int ep = 0; ep < cfg_.episodes; ++ep) {
      const std::size_t first = result.steps.size();
      for (int h = 0; h < kHoursPerEpisode; ++h, ++step) {
        const auto& rec = records_[step];
        std::array<double, env::kEssCount> charges{};
        for (std::size_t i = 0; i < env::kEssCount; ++i) charges[i] = grid_.ess_states()[i].charge;

        ma::ObservationContext pctx;
        pctx.record = &rec;
        pctx.charges = charges;
        pctx.forecast = forecasts_[step];
        pctx.offer = prev_offer;
        const Vector pobs = ma::build_observation(primary_schema_, pctx, norm_);
        const bool random = step < cfg_.agent.warmup_random_steps;
        const auto mode = rl::ActionMode::TrainNoisy;

        env::StepControls controls;
        controls.offer = {0.0, cfg_.env.prices.feed_in_tariff};
        std::vector<Vector> obs(agents_.size()), acts(agents_.size());
        std::optional<ma::MadqnChain::Decision> decision;

        if (kind_ == ControllerKind::Rbm) {
          controls.ess_power = ma::rbm_policy(cfg_.env, rec, charges);
        } else if (kind_ == ControllerKind::Madqn) {
          decision = chain_->decide(pobs, mode, random, levels);
          for (std::size_t i = 0; i < env::kEssCount; ++i)
            controls.ess_power[i] = levels[decision->actions[i]] * cfg_.env.ess[i].power_max;
        } else {
          for (std::size_t i = 0; i < agents_.size(); ++i) {
            const auto& spec = agents_[i];
            if (!spec.is_primary()) continue;
            obs[i] = pobs;
            acts[i] = random ? group_->random_action(i) : group_->act(i, pobs, mode);
            apply_primary_action(spec, acts[i], rec, controls);
          }
          for (std::size_t i = 0; i < agents_.size(); ++i) {
            const auto& spec = agents_[i];
            if (spec.is_primary()) continue;
            std::normal_distribution<double> noise(0.0, cfg_.env.xmg_noise_std);
            const double demand = market::xmg_demand(rec.demand, noise(xmg_rng_));
            ma::ObservationContext xctx;
            xctx.record = &rec;
            xctx.offer = prev_offer;
            xctx.own_demand = demand;
            obs[i] = ma::build_observation(spec.schema, xctx, norm_);
            acts[i] = random ? group_->random_action(i) : group_->act(i, obs[i], mode);
            controls.bids.push_back(ma::decode_bid(spec.xmg_index, acts[i](0), acts[i](1), cfg_.env, rec));
            controls.xmg_demands.push_back(demand);
          }
        }

        const auto outcome = grid_.step(rec, controls);
        const auto rewards = ma::assign_rewards(outcome, agents_);

        if (group_) {
          group_->record(obs, acts, Eigen::Map<const Vector>(rewards.scaled.data(),
                                                            static_cast<Eigen::Index>(rewards.scaled.size())));
          if (step >= cfg_.agent.learn_start_step) {
            const auto stats = group_->learn_step();
            for (std::size_t i = 0; i < stats.size(); ++i) accum_[i].add(stats[i]);
          }
        } else if (chain_) {
          chain_->record(*decision, rewards.scaled);
          if (step >= cfg_.agent.learn_start_step) {
            const auto stats = chain_->learn_step();
            for (std::size_t i = 0; i < stats.size(); ++i) accum_[i].add(stats[i]);
          }
        }

        result.steps.push_back(make_log(ep, step, rec, outcome, controls));
        if (cfg_.case_id == 2 && cfg_.write_traces) {
          for (std::size_t k = 0; k < controls.bids.size(); ++k) {
            result.auction.push_back({step, "xmg-" + std::to_string(controls.bids[k].agent_id + 1),
                                      controls.xmg_demands[k], controls.bids[k].volume, controls.bids[k].price,
                                      outcome.grid.auction.allocations[k]});
          }
        }
        prev_offer = controls.offer;
      }

      const bool eval = ep >= cfg_.train_episodes();
      const auto m = compute_metrics(std::span<const StepLog>(result.steps).subspan(first), ep, eval);
      result.episodes.push_back(m);
      for (std::size_t i = 0; i < accum_.size(); ++i) {
        const auto& a = accum_[i];
        const double n = a.updates ? static_cast<double>(a.updates) : 1.0;
        result.train_log.push_back({ep, agents_[i].id, a.updates, a.loss / n, a.target / n, a.skipped});
        accum_[i] = {};
      }
      if (options.on_episode) options.on_episode(ep, m);
    }
    result.summary = summarise(result.episodes);
    return result;
  }

  void write_checkpoints(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    auto save = [&](const std::string& name, const nn::NetworkParams& p) {
      std::ofstream os(dir / name);
      nn::save_network(os, p);
    };
    if (group_) {
      for (std::size_t i = 0; i < agents_.size(); ++i) {
        const auto& ag = group_->agent(i);
        save(agents_[i].id + "-actor.txt", ag.actor().params());
        for (std::size_t c = 0; c < ag.critic_count(); ++c)
          save(agents_[i].id + "-critic" + std::to_string(c + 1) + ".txt", ag.critic(c).params());
      }
    }
    if (chain_) {
      for (std::size_t i = 0; i < chain_->size(); ++i)
        save(agents_[i].id + "-q.txt", chain_->agent(i).q_network().params());
    }
    if (forecaster_) {
      std::ofstream os(dir / "forecaster.txt");
      forecast::save_forecaster(os, *forecaster_);
    }
  }

 private:
  void apply_primary_action(const ma::AgentSpec& spec, const Vector& a, const env::ExogenousRecord& rec,
                            env::StepControls& controls) const {
    switch (spec.role) {
      case ma::Role::Global:
        for (std::size_t k = 0; k < env::kEssCount; ++k)
          controls.ess_power[k] = ma::scale_action(a(static_cast<Eigen::Index>(k)), ma::ess_bounds(cfg_.env, k));
        if (spec.action_dim == 5) controls.offer = ma::decode_offer(a(3), a(4), cfg_.env, rec);
        break;
      case ma::Role::EssLib:
      case ma::Role::EssVrb:
      case ma::Role::EssSc: {
        const std::size_t k = static_cast<std::size_t>(spec.role) - static_cast<std::size_t>(ma::Role::EssLib);
        controls.ess_power[k] = ma::scale_action(a(0), ma::ess_bounds(cfg_.env, k));
        break;
      }
      case ma::Role::Mga:
        controls.offer = ma::decode_offer(a(0), a(1), cfg_.env, rec);
        break;
      case ma::Role::Xmg:
        break;
    }
  }

  StepLog make_log(int ep, std::size_t t, const env::ExogenousRecord& rec, const env::StepOutcome& o,
                   const env::StepControls& controls) const {
    StepLog s;
    s.episode = ep;
    s.t = t;
    s.hour_of_week = rec.hour_of_week;
    s.demand = rec.demand;
    s.price = rec.wholesale_price;
    s.wt = rec.wt_output;
    s.pv = rec.pv_output;
    for (std::size_t i = 0; i < env::kEssCount; ++i) {
      s.ess_power[i] = o.ess[i].applied;
      s.charge[i] = o.ess[i].charge_after;
    }
    s.grid_import = o.grid.grid_import;
    s.exchange_price = o.grid.price;
    s.r_in = o.grid.r_in;
    s.r_mga = o.grid.r_mga;
    s.idle_value = o.idle_value;
    s.mga_idle_value =
        controls.offer.sell_volume > 0.0 ? env::counterfactual_value(o.snapshot, env::kActuatorMga) : o.grid.value();
    const auto pen = o.total_penalties();
    s.cpc = pen.cpc;
    s.sdc = pen.sdc;
    s.cap = pen.cap;
    s.offer_volume = controls.offer.sell_volume;
    s.reserve_price = controls.offer.reserve_price;
    s.sold = controls.offer.sell_volume - o.grid.auction.unsold;
    if (controls.offer.sell_volume <= 0.0) s.sold = 0.0;
    return s;
  }

  RunConfig cfg_;
  ControllerKind kind_;
  env::Microgrid grid_;
  Rng xmg_rng_;
  std::vector<env::ExogenousRecord> records_;
  ma::ObservationNormaliser norm_;
  std::optional<forecast::ForecastModel> forecaster_;
  std::vector<forecast::Forecast> forecasts_;
  std::vector<ma::AgentSpec> agents_;
  ma::ObservationSchema primary_schema_;
  std::optional<ma::ActorCriticGroup> group_;
  std::optional<ma::MadqnChain> chain_;
  std::vector<Accumulator> accum_;
};

std::string g(double v) { return fmt::format("{:.10g}", v); }

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  os << text;
}

}  // namespace

RunResult run_case(const RunConfig& cfg, const RunOptions& options) {
  cfg.validate();
  Simulation sim(cfg);
  auto result = sim.run(options);
  if (options.write_outputs) {
    write_run_outputs(result, cfg.output_dir);
    if (cfg.write_checkpoints) sim.write_checkpoints(cfg.output_dir / "checkpoints");
  }
  return result;
}

void write_run_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "config.yaml", dump_yaml(r.config));

  std::string m =
      "episode,split,raw_savings,adjusted_savings,cpc,sdc,cap,mga_revenue,mga_net,reward,reward_smoothed,"
      "cumulative_adjusted,ess_loss_pct,ess_loss_undefined,mga_share_pct\n";
  std::vector<double> rewards;
  for (const auto& e : r.episodes) rewards.push_back(e.reward);
  const auto smooth = trailing_mean(rewards, 5);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < r.episodes.size(); ++i) {
    const auto& e = r.episodes[i];
    cumulative += e.adjusted_savings;
    m += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", e.episode, e.evaluation ? "eval" : "train",
                     g(e.raw_savings), g(e.adjusted_savings), g(e.cpc), g(e.sdc), g(e.cap), g(e.mga_revenue),
                     g(e.mga_net), g(e.reward), g(smooth[i]), g(cumulative), g(e.ess_loss_pct),
                     e.ess_loss_undefined ? 1 : 0, g(e.mga_share_pct));
  }
  write_text(dir / "metrics.csv", m);

  const auto& s = r.summary;
  const auto& c = r.config;
  std::string sum =
      "algorithm,case,reward_mode,seed,eval_episodes,raw_savings,adjusted_savings,cpc,sdc,cap,ess_loss_pct,"
      "ess_loss_undefined,mga_revenue,mga_net,mga_share_pct\n";
  sum += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(c.algorithm), c.case_id,
                     c.algorithm == AlgorithmId::Rbm ? "n/a" : ma::to_string(c.reward_mode), c.seed, s.eval_episodes,
                     g(s.raw_savings), g(s.adjusted_savings), g(s.cpc), g(s.sdc), g(s.cap), g(s.ess_loss_pct),
                     s.ess_loss_undefined ? 1 : 0, g(s.mga_revenue), g(s.mga_net), g(s.mga_share_pct));
  write_text(dir / "summary.csv", sum);

  std::string tl = "episode,agent,updates,critic_loss,mean_target,skipped\n";
  for (const auto& t : r.train_log)
    tl += fmt::format("{},{},{},{},{},{}\n", t.episode, t.agent, t.updates, g(t.critic_loss), g(t.mean_target),
                      t.skipped);
  write_text(dir / "train_log.csv", tl);

  if (r.config.write_traces) {
    std::string st =
        "t,episode,hour_of_week,demand,price,wt,pv,x_lib,x_vrb,x_sc,c_lib,c_vrb,c_sc,grid_import,exchange_price,"
        "r_in,r_mga,idle_value,mga_idle_value,cpc,sdc,cap,offer_volume,reserve_price,sold\n";
    for (const auto& l : r.steps)
      st += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", l.t, l.episode,
                        l.hour_of_week, g(l.demand), g(l.price), g(l.wt), g(l.pv), g(l.ess_power[0]),
                        g(l.ess_power[1]), g(l.ess_power[2]), g(l.charge[0]), g(l.charge[1]), g(l.charge[2]),
                        g(l.grid_import), g(l.exchange_price), g(l.r_in), g(l.r_mga), g(l.idle_value),
                        g(l.mga_idle_value), g(l.cpc), g(l.sdc), g(l.cap), g(l.offer_volume), g(l.reserve_price),
                        g(l.sold));
    write_text(dir / "steps.csv", st);
    if (r.config.case_id == 2) {
      std::string au = "t,agent,demand,volume,price,filled\n";
      for (const auto& a : r.auction)
        au += fmt::format("{},{},{},{},{},{}\n", a.t, a.agent, g(a.demand), g(a.volume), g(a.price), g(a.filled));
      write_text(dir / "auction.csv", au);
    }
  }
}

}  // namespace mgrid::harness
