#include "mgrid/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mgrid/common.hpp"

namespace mgrid::harness {

std::string_view to_string(AlgorithmId a) {
  switch (a) {
    case AlgorithmId::Ddpg: return "ddpg";
    case AlgorithmId::D3pg: return "d3pg";
    case AlgorithmId::Td3: return "td3";
    case AlgorithmId::Maddpg: return "maddpg";
    case AlgorithmId::Mad3pg: return "mad3pg";
    case AlgorithmId::Matd3: return "matd3";
    case AlgorithmId::Madqn: return "madqn";
    case AlgorithmId::Rbm: return "rbm";
    case AlgorithmId::Marainbow: return "marainbow";
  }
  return "?";
}

AlgorithmId parse_algorithm(std::string_view s) {
  for (auto a : {AlgorithmId::Ddpg, AlgorithmId::D3pg, AlgorithmId::Td3, AlgorithmId::Maddpg, AlgorithmId::Mad3pg,
                 AlgorithmId::Matd3, AlgorithmId::Madqn, AlgorithmId::Rbm, AlgorithmId::Marainbow})
    if (to_string(a) == s) return a;
  throw ConfigError("unknown algorithm '" + std::string(s) +
                    "' (expected ddpg, d3pg, td3, maddpg, mad3pg, matd3, madqn, rbm)");
}

bool is_multi_agent(AlgorithmId a) {
  return a == AlgorithmId::Maddpg || a == AlgorithmId::Mad3pg || a == AlgorithmId::Matd3 ||
         a == AlgorithmId::Madqn || a == AlgorithmId::Marainbow;
}

std::vector<std::string> RunConfig::validation_errors() const {
  std::vector<std::string> errs;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };
  auto guard = [&](const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      errs.push_back(e.what());
    }
  };
  check(case_id == 1 || case_id == 2, "case must be 1 or 2");
  check(episodes >= 2, "episodes must be at least 2");
  check(algorithm != AlgorithmId::Marainbow,
        "algorithm 'marainbow' is reserved and has no implementation");
  if (algorithm != AlgorithmId::Rbm) {
    if (is_multi_agent(algorithm))
      check(reward_mode != ma::RewardMode::Sas,
            "algorithm '" + std::string(to_string(algorithm)) + "' is multi-agent; reward_mode must be mas-s or mas-mc");
    else
      check(reward_mode == ma::RewardMode::Sas,
            "algorithm '" + std::string(to_string(algorithm)) + "' is single-agent; reward_mode must be sas");
  }
  if (case_id == 2)
    check(algorithm != AlgorithmId::Rbm && algorithm != AlgorithmId::Madqn,
          "rbm and madqn are case 1 benchmarks only");
  check(reward_mode != ma::RewardMode::SelfInterested, "reward_mode self-interested is reserved for xMG agents");
  guard([&] { env.validate(); });
  guard([&] { agent.validate(); });
  guard([&] { forecast.model.validate(); });
  for (std::size_t h : network.actor_hidden) check(h > 0, "network.actor_hidden entries must be positive");
  for (std::size_t h : network.critic_hidden) check(h > 0, "network.critic_hidden entries must be positive");
  check(network.actor_step_size >= 0.0 && network.critic_step_size >= 0.0, "network step sizes must be non-negative");
  if (data.source == DataSource::Csv) check(!data.path.empty(), "data.path is required when data.source is csv");
  if (data.source == DataSource::Synthetic) guard([&] { data.synth.validate(); });
  if (case_id == 2) check(env.xmg_count >= 1, "case 2 needs at least one xMG");
  return errs;
}

void RunConfig::validate() const {
  const auto errs = validation_errors();
  if (errs.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : errs) msg += "\n  - " + e;
  throw ConfigError(msg);
}

namespace {

/// Reads a mapping while recording unknown keys and type errors.
class Section {
 public:
  Section(const YAML::Node& node, std::string path, std::vector<std::string>& errors)
      : node_(node), path_(std::move(path)), errors_(errors) {
    if (present() && !node_.IsMap()) errors_.push_back(path_ + ": expected a mapping");
  }
  ~Section() {
    if (!present() || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) errors_.push_back(where(key) + ": unknown key");
    }
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!present() || !node_.IsMap() || !node_[key]) return;
    try {
      out = node_[key].as<T>();
    } catch (const YAML::Exception&) {
      errors_.push_back(where(key) + ": invalid value '" + scalar(node_[key]) + "'");
    }
  }

  void read_with(const std::string& key, const std::function<void(const std::string&)>& parse) {
    std::string text;
    seen_.insert(key);
    if (!present() || !node_.IsMap() || !node_[key]) return;
    try {
      text = node_[key].as<std::string>();
      parse(text);
    } catch (const YAML::Exception&) {
      errors_.push_back(where(key) + ": invalid value");
    } catch (const std::exception& e) {
      errors_.push_back(where(key) + ": " + e.what());
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(present() && node_.IsMap() ? node_[key] : YAML::Node(), where(key), errors_);
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return present() && node_.IsMap() ? node_[key] : YAML::Node();
  }

  /// Absent keys and empty values both leave the defaults in place.
  bool present() const { return node_ && !node_.IsNull(); }
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::vector<std::string>& errors() { return errors_; }

 private:
  static std::string scalar(const YAML::Node& n) { return n.IsScalar() ? n.Scalar() : "<non-scalar>"; }
  YAML::Node node_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void read_converter(Section s, env::ConverterSpec& c) {
  s.read("rated_load", c.rated_load);
  std::vector<double> coeffs(c.loss_coefficients.begin(), c.loss_coefficients.end());
  s.read("loss_coefficients", coeffs);
  if (coeffs.size() == 3)
    std::copy(coeffs.begin(), coeffs.end(), c.loss_coefficients.begin());
  else
    s.errors().push_back(s.where("loss_coefficients") + ": expected three values");
  s.read("efficiency_floor", c.efficiency_floor);
  s.read("efficiency_ceiling", c.efficiency_ceiling);
}

void read_ess(Section s, env::EssSpec& e) {
  s.read("capacity_max", e.capacity_max);
  s.read("power_max", e.power_max);
  s.read("sdc_efficiency", e.sdc_efficiency);
  s.read("rte_efficiency", e.rte_efficiency);
  s.read("capacity_cost", e.capacity_cost);
  s.read("lifecycles", e.lifecycles);
  s.read("cycle_cost", e.cycle_cost);
}

void read_env(Section s, env::EnvConfig& e) {
  s.read_with("sdc_mode", [&](const std::string& v) {
    if (v == "energy-lost") e.sdc_mode = env::SdcMode::EnergyLost;
    else if (v == "literal") e.sdc_mode = env::SdcMode::Literal;
    else throw ConfigError("expected energy-lost or literal");
  });
  s.read("initial_charge_fraction", e.initial_charge_fraction);
  s.read("price_cap", e.prices.price_cap);
  s.read("feed_in_tariff", e.prices.feed_in_tariff);
  {
    auto w = s.child("wind");
    w.read("cut_in_speed", e.wind.cut_in_speed);
    w.read("rated_speed", e.wind.rated_speed);
    w.read("cut_out_speed", e.wind.cut_out_speed);
    w.read("blade_radius", e.wind.blade_radius);
    w.read("power_coefficient", e.wind.power_coefficient);
    w.read("rated_power", e.wind.rated_power);
    w.read("air_density", e.wind.air_density);
    w.read("turbine_count", e.wind.turbine_count);
  }
  {
    auto p = s.child("solar");
    p.read("rated_power", e.solar.rated_power);
    p.read("reference_irradiance", e.solar.reference_irradiance);
  }
  {
    auto ess = s.child("ess");
    read_ess(ess.child("lib"), e.ess[0]);
    read_ess(ess.child("vrb"), e.ess[1]);
    read_ess(ess.child("sc"), e.ess[2]);
  }
  {
    auto c = s.child("converters");
    const YAML::Node inv = c.raw("inverters");
    if (inv && !inv.IsNull()) {
      if (!inv.IsSequence()) {
        c.errors().push_back(c.where("inverters") + ": expected a list");
      } else {
        std::vector<env::ConverterSpec> list;
        for (std::size_t i = 0; i < inv.size(); ++i) {
          env::ConverterSpec spec;
          spec.kind = env::ConverterKind::Inverter;
          read_converter(Section(inv[i], c.where("inverters") + "[" + std::to_string(i) + "]", c.errors()), spec);
          list.push_back(spec);
        }
        e.converters.inverters = list;
      }
    }
    read_converter(c.child("wt_transformer"), e.converters.wt_transformer);
    read_converter(c.child("grid_transformer"), e.converters.grid_transformer);
    read_converter(c.child("xmg_transformer"), e.converters.xmg_transformer);
  }
  s.read("xmg_count", e.xmg_count);
  s.read("xmg_noise_std", e.xmg_noise_std);
  s.read("xmg_volume_cap_fraction", e.xmg_volume_cap_fraction);
  s.read("mga_revenue_share", e.mga_revenue_share);
  s.read("mga_volume_limit", e.mga_volume_limit);
  s.read("mga_volume_includes_res_surplus", e.mga_volume_includes_res_surplus);
}

void read_agent(Section s, rl::AgentHyperparams& a) {
  s.read("discount", a.discount);
  s.read("soft_update_rate", a.soft_update_rate);
  s.read("batch_size", a.batch_size);
  s.read("buffer_capacity", a.buffer_capacity);
  s.read("warmup_random_steps", a.warmup_random_steps);
  s.read("learn_start_step", a.learn_start_step);
  s.read("actor_update_period", a.actor_update_period);
  s.read("atoms", a.atoms);
  s.read("v_min", a.v_min);
  s.read("v_max", a.v_max);
}

void read_network(Section s, rl::NetworkConfig& n) {
  s.read("actor_hidden", n.actor_hidden);
  s.read("critic_hidden", n.critic_hidden);
  s.read("noisy", n.noisy);
  s.read("actor_step_size", n.actor_step_size);
  s.read("critic_step_size", n.critic_step_size);
  s.read_with("optimizer", [&](const std::string& v) {
    if (v == "adam") n.optimizer = nn::OptimizerKind::Adam;
    else if (v == "sgd") n.optimizer = nn::OptimizerKind::Sgd;
    else throw ConfigError("expected adam or sgd");
  });
}

void read_synth(Section s, data::SynthConfig& c) {
  s.read("weeks", c.weeks);
  s.read("seed", c.seed);
  s.read("demand_base", c.demand_base);
  s.read("demand_daily_amplitude", c.demand_daily_amplitude);
  s.read("demand_weekend_factor", c.demand_weekend_factor);
  s.read("demand_noise_std", c.demand_noise_std);
  s.read("price_base", c.price_base);
  s.read("price_demand_coupling", c.price_demand_coupling);
  s.read("price_noise_std", c.price_noise_std);
  s.read("price_spike_probability", c.price_spike_probability);
  s.read("price_spike_size", c.price_spike_size);
  s.read("price_max", c.price_max);
  s.read("wind_mean", c.wind_mean);
  s.read("wind_persistence", c.wind_persistence);
  s.read("wind_noise_std", c.wind_noise_std);
  s.read("solar_peak", c.solar_peak);
  s.read("cloud_mean", c.cloud_mean);
  s.read("cloud_persistence", c.cloud_persistence);
  s.read("cloud_noise_std", c.cloud_noise_std);
}

}  // namespace

void apply_yaml(RunConfig& cfg, const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("configuration is not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) return;
  std::vector<std::string> errors;
  {
    Section s(root, "", errors);
    s.read("case", cfg.case_id);
    s.read_with("algorithm", [&](const std::string& v) { cfg.algorithm = parse_algorithm(v); });
    s.read_with("reward_mode", [&](const std::string& v) { cfg.reward_mode = ma::parse_reward_mode(v); });
    s.read("seed", cfg.seed);
    s.read("episodes", cfg.episodes);
    std::string out = cfg.output_dir.string();
    s.read("output_dir", out);
    cfg.output_dir = out;
    s.read("write_traces", cfg.write_traces);
    s.read("write_checkpoints", cfg.write_checkpoints);
    read_env(s.child("env"), cfg.env);
    read_agent(s.child("agent"), cfg.agent);
    read_network(s.child("network"), cfg.network);
    {
      auto f = s.child("forecast");
      f.read("enabled", cfg.forecast.enabled);
      f.read("hidden_units", cfg.forecast.model.hidden_units);
      f.read("epochs", cfg.forecast.model.epochs);
      f.read("batch_size", cfg.forecast.model.batch_size);
      f.read("step_size", cfg.forecast.model.step_size);
      f.read("validation_fraction", cfg.forecast.model.validation_fraction);
      f.read("seed", cfg.forecast.model.seed);
    }
    {
      auto d = s.child("data");
      d.read_with("source", [&](const std::string& v) {
        if (v == "synthetic") cfg.data.source = DataSource::Synthetic;
        else if (v == "csv") cfg.data.source = DataSource::Csv;
        else throw ConfigError("expected synthetic or csv");
      });
      std::string path = cfg.data.path.string();
      d.read("path", path);
      cfg.data.path = path;
      d.read("synth_seed_from_run", cfg.data.synth_seed_from_run);
      read_synth(d.child("synth"), cfg.data.synth);
    }
  }
  if (!errors.empty()) {
    std::string msg = "configuration errors:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
}

void apply_yaml_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_yaml(cfg, ss.str());
}

namespace {

void emit_converter(YAML::Emitter& y, const env::ConverterSpec& c) {
  y << YAML::BeginMap;
  y << YAML::Key << "rated_load" << YAML::Value << c.rated_load;
  y << YAML::Key << "loss_coefficients" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double v : c.loss_coefficients) y << v;
  y << YAML::EndSeq;
  y << YAML::Key << "efficiency_floor" << YAML::Value << c.efficiency_floor;
  y << YAML::Key << "efficiency_ceiling" << YAML::Value << c.efficiency_ceiling;
  y << YAML::EndMap;
}

void emit_ess(YAML::Emitter& y, const env::EssSpec& e) {
  y << YAML::BeginMap;
  y << YAML::Key << "capacity_max" << YAML::Value << e.capacity_max;
  y << YAML::Key << "power_max" << YAML::Value << e.power_max;
  y << YAML::Key << "sdc_efficiency" << YAML::Value << e.sdc_efficiency;
  y << YAML::Key << "rte_efficiency" << YAML::Value << e.rte_efficiency;
  y << YAML::Key << "capacity_cost" << YAML::Value << e.capacity_cost;
  y << YAML::Key << "lifecycles" << YAML::Value << e.lifecycles;
  y << YAML::Key << "cycle_cost" << YAML::Value << e.cycle_cost;
  y << YAML::EndMap;
}

template <typename T>
void kv(YAML::Emitter& y, const char* key, const T& v) {
  y << YAML::Key << key << YAML::Value << v;
}

void seq(YAML::Emitter& y, const char* key, const std::vector<std::size_t>& v) {
  y << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto x : v) y << x;
  y << YAML::EndSeq;
}

}  // namespace

std::string dump_yaml(const RunConfig& cfg) {
  YAML::Emitter y;
  y.SetDoublePrecision(17);
  y << YAML::BeginMap;
  kv(y, "case", cfg.case_id);
  kv(y, "algorithm", std::string(to_string(cfg.algorithm)));
  kv(y, "reward_mode", std::string(ma::to_string(cfg.reward_mode)));
  kv(y, "seed", cfg.seed);
  kv(y, "episodes", cfg.episodes);
  kv(y, "output_dir", cfg.output_dir.string());
  kv(y, "write_traces", cfg.write_traces);
  kv(y, "write_checkpoints", cfg.write_checkpoints);

  const auto& e = cfg.env;
  y << YAML::Key << "env" << YAML::Value << YAML::BeginMap;
  kv(y, "sdc_mode", std::string(e.sdc_mode == env::SdcMode::EnergyLost ? "energy-lost" : "literal"));
  kv(y, "initial_charge_fraction", e.initial_charge_fraction);
  kv(y, "price_cap", e.prices.price_cap);
  kv(y, "feed_in_tariff", e.prices.feed_in_tariff);
  y << YAML::Key << "wind" << YAML::Value << YAML::BeginMap;
  kv(y, "cut_in_speed", e.wind.cut_in_speed);
  kv(y, "rated_speed", e.wind.rated_speed);
  kv(y, "cut_out_speed", e.wind.cut_out_speed);
  kv(y, "blade_radius", e.wind.blade_radius);
  kv(y, "power_coefficient", e.wind.power_coefficient);
  kv(y, "rated_power", e.wind.rated_power);
  kv(y, "air_density", e.wind.air_density);
  kv(y, "turbine_count", e.wind.turbine_count);
  y << YAML::EndMap;
  y << YAML::Key << "solar" << YAML::Value << YAML::BeginMap;
  kv(y, "rated_power", e.solar.rated_power);
  kv(y, "reference_irradiance", e.solar.reference_irradiance);
  y << YAML::EndMap;
  y << YAML::Key << "ess" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "lib" << YAML::Value;
  emit_ess(y, e.ess[0]);
  y << YAML::Key << "vrb" << YAML::Value;
  emit_ess(y, e.ess[1]);
  y << YAML::Key << "sc" << YAML::Value;
  emit_ess(y, e.ess[2]);
  y << YAML::EndMap;
  y << YAML::Key << "converters" << YAML::Value << YAML::BeginMap;
  y << YAML::Key << "inverters" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : e.converters.inverters) emit_converter(y, c);
  y << YAML::EndSeq;
  y << YAML::Key << "wt_transformer" << YAML::Value;
  emit_converter(y, e.converters.wt_transformer);
  y << YAML::Key << "grid_transformer" << YAML::Value;
  emit_converter(y, e.converters.grid_transformer);
  y << YAML::Key << "xmg_transformer" << YAML::Value;
  emit_converter(y, e.converters.xmg_transformer);
  y << YAML::EndMap;
  kv(y, "xmg_count", e.xmg_count);
  kv(y, "xmg_noise_std", e.xmg_noise_std);
  kv(y, "xmg_volume_cap_fraction", e.xmg_volume_cap_fraction);
  kv(y, "mga_revenue_share", e.mga_revenue_share);
  kv(y, "mga_volume_limit", e.mga_volume_limit);
  kv(y, "mga_volume_includes_res_surplus", e.mga_volume_includes_res_surplus);
  y << YAML::EndMap;

  const auto& a = cfg.agent;
  y << YAML::Key << "agent" << YAML::Value << YAML::BeginMap;
  kv(y, "discount", a.discount);
  kv(y, "soft_update_rate", a.soft_update_rate);
  kv(y, "batch_size", a.batch_size);
  kv(y, "buffer_capacity", a.buffer_capacity);
  kv(y, "warmup_random_steps", a.warmup_random_steps);
  kv(y, "learn_start_step", a.learn_start_step);
  kv(y, "actor_update_period", a.actor_update_period);
  kv(y, "atoms", a.atoms);
  kv(y, "v_min", a.v_min);
  kv(y, "v_max", a.v_max);
  y << YAML::EndMap;

  const auto& n = cfg.network;
  y << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
  seq(y, "actor_hidden", n.actor_hidden);
  seq(y, "critic_hidden", n.critic_hidden);
  kv(y, "noisy", n.noisy);
  kv(y, "actor_step_size", n.actor_step_size);
  kv(y, "critic_step_size", n.critic_step_size);
  kv(y, "optimizer", std::string(n.optimizer == nn::OptimizerKind::Adam ? "adam" : "sgd"));
  y << YAML::EndMap;

  const auto& f = cfg.forecast;
  y << YAML::Key << "forecast" << YAML::Value << YAML::BeginMap;
  kv(y, "enabled", f.enabled);
  kv(y, "hidden_units", f.model.hidden_units);
  kv(y, "epochs", f.model.epochs);
  kv(y, "batch_size", f.model.batch_size);
  kv(y, "step_size", f.model.step_size);
  kv(y, "validation_fraction", f.model.validation_fraction);
  kv(y, "seed", f.model.seed);
  y << YAML::EndMap;

  const auto& d = cfg.data;
  y << YAML::Key << "data" << YAML::Value << YAML::BeginMap;
  kv(y, "source", std::string(d.source == DataSource::Synthetic ? "synthetic" : "csv"));
  kv(y, "path", d.path.string());
  kv(y, "synth_seed_from_run", d.synth_seed_from_run);
  y << YAML::Key << "synth" << YAML::Value << YAML::BeginMap;
  const auto& s = d.synth;
  kv(y, "weeks", s.weeks);
  kv(y, "seed", s.seed);
  kv(y, "demand_base", s.demand_base);
  kv(y, "demand_daily_amplitude", s.demand_daily_amplitude);
  kv(y, "demand_weekend_factor", s.demand_weekend_factor);
  kv(y, "demand_noise_std", s.demand_noise_std);
  kv(y, "price_base", s.price_base);
  kv(y, "price_demand_coupling", s.price_demand_coupling);
  kv(y, "price_noise_std", s.price_noise_std);
  kv(y, "price_spike_probability", s.price_spike_probability);
  kv(y, "price_spike_size", s.price_spike_size);
  kv(y, "price_max", s.price_max);
  kv(y, "wind_mean", s.wind_mean);
  kv(y, "wind_persistence", s.wind_persistence);
  kv(y, "wind_noise_std", s.wind_noise_std);
  kv(y, "solar_peak", s.solar_peak);
  kv(y, "cloud_mean", s.cloud_mean);
  kv(y, "cloud_persistence", s.cloud_persistence);
  kv(y, "cloud_noise_std", s.cloud_noise_std);
  y << YAML::EndMap;
  y << YAML::EndMap;

  y << YAML::EndMap;
  return std::string(y.c_str()) + "\n";
}

void apply_desk_preset(RunConfig& cfg) {
  cfg.network.actor_hidden = {64, 64};
  cfg.network.critic_hidden = {64, 64};
  cfg.agent.batch_size = 64;
}

}  // namespace mgrid::harness
