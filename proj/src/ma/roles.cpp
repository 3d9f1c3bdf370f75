#include "mgrid/ma/roles.hpp"

#include <algorithm>
#include <stdexcept>

#include "mgrid/common.hpp"

namespace mgrid::ma {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::EssLib: return "ess-lib";
    case Role::EssVrb: return "ess-vrb";
    case Role::EssSc: return "ess-sc";
    case Role::Mga: return "mga";
    case Role::Xmg: return "xmg";
    case Role::Global: return "global";
  }
  return "?";
}

std::string_view to_string(RewardMode m) {
  switch (m) {
    case RewardMode::Sas: return "sas";
    case RewardMode::MasS: return "mas-s";
    case RewardMode::MasMc: return "mas-mc";
    case RewardMode::SelfInterested: return "self-interested";
  }
  return "?";
}

RewardMode parse_reward_mode(std::string_view s) {
  if (s == "sas") return RewardMode::Sas;
  if (s == "mas-s") return RewardMode::MasS;
  if (s == "mas-mc") return RewardMode::MasMc;
  throw ConfigError("unknown reward_mode '" + std::string(s) + "' (expected sas, mas-s or mas-mc)");
}

double scale_action(double a, ActionBounds b) {
  const double u = (std::clamp(a, -1.0, 1.0) + 1.0) * 0.5;
  return b.low + u * (b.high - b.low);
}

double unscale_action(double x, ActionBounds b) {
  if (!(b.high > b.low)) return 0.0;
  return 2.0 * (x - b.low) / (b.high - b.low) - 1.0;
}

std::vector<AgentSpec> build_agents(int case_id, RewardMode mode, int xmg_count) {
  if (case_id != 1 && case_id != 2) throw ConfigError("case must be 1 or 2");
  if (mode == RewardMode::SelfInterested) throw ConfigError("self-interested is reserved for xMG agents");
  std::vector<AgentSpec> agents;
  const auto schema = primary_schema(case_id);
  if (mode == RewardMode::Sas) {
    AgentSpec g;
    g.id = "global";
    g.role = Role::Global;
    g.schema = schema;
    g.action_dim = case_id == 1 ? 3 : 5;
    g.reward_mode = RewardMode::Sas;
    g.actuators = case_id == 1 ? (env::kActuatorLib | env::kActuatorVrb | env::kActuatorSc) : env::kAllActuators;
    agents.push_back(g);
  } else {
    const std::array<Role, 3> roles{Role::EssLib, Role::EssVrb, Role::EssSc};
    for (std::size_t i = 0; i < env::kEssCount; ++i) {
      AgentSpec a;
      a.id = std::string(to_string(roles[i]));
      a.role = roles[i];
      a.schema = schema;
      a.action_dim = 1;
      a.reward_mode = mode;
      a.actuators = env::ess_actuator(i);
      agents.push_back(a);
    }
    if (case_id == 2) {
      AgentSpec m;
      m.id = "mga";
      m.role = Role::Mga;
      m.schema = schema;
      m.action_dim = 2;
      m.reward_mode = mode;
      m.actuators = env::kActuatorMga;
      agents.push_back(m);
    }
  }
  if (case_id == 2) {
    for (int k = 0; k < xmg_count; ++k) {
      AgentSpec x;
      x.id = "xmg-" + std::to_string(k + 1);
      x.role = Role::Xmg;
      x.xmg_index = static_cast<std::size_t>(k);
      x.schema = xmg_schema();
      x.action_dim = 2;
      x.reward_mode = RewardMode::SelfInterested;
      agents.push_back(x);
    }
  }
  return agents;
}

int primary_agent_count(const std::vector<AgentSpec>& agents) {
  return static_cast<int>(std::count_if(agents.begin(), agents.end(), [](const AgentSpec& a) { return a.is_primary(); }));
}

ActionBounds ess_bounds(const env::EnvConfig& config, std::size_t i) {
  return {-config.ess[i].power_max, config.ess[i].power_max};
}

double mga_volume_bound(const env::EnvConfig& config, const env::ExogenousRecord& record) {
  double bound = config.mga_volume_limit;
  if (config.mga_volume_includes_res_surplus)
    bound += std::max(0.0, record.wt_output + record.pv_output - record.demand);
  return bound;
}

market::MgaOffer decode_offer(double volume_action, double price_action, const env::EnvConfig& config,
                              const env::ExogenousRecord& record) {
  market::MgaOffer o;
  o.sell_volume = scale_action(volume_action, {0.0, mga_volume_bound(config, record)});
  o.reserve_price = scale_action(price_action, {config.prices.feed_in_tariff, config.prices.price_cap});
  return o;
}

market::Bid decode_bid(std::size_t agent_id, double volume_action, double price_action,
                       const env::EnvConfig& config, const env::ExogenousRecord& record) {
  market::Bid b;
  b.agent_id = agent_id;
  b.volume = scale_action(volume_action, {0.0, config.xmg_volume_cap_fraction * record.demand});
  b.price = scale_action(price_action, {config.prices.feed_in_tariff, config.prices.price_cap});
  return b;
}

AgentRewards assign_rewards(const env::StepOutcome& outcome, const std::vector<AgentSpec>& agents) {
  AgentRewards out;
  const int n_primary = primary_agent_count(agents);
  const auto& g = outcome.grid;
  const double r_mga = g.r_mga;
  for (const auto& a : agents) {
    env::RewardBreakdown b;
    switch (a.reward_mode) {
      case RewardMode::Sas:
        b = env::step_reward(g.grid_import, g.price, r_mga, outcome.total_penalties(), outcome.idle_value, 1);
        break;
      case RewardMode::MasS:
        b = env::step_reward(g.grid_import, g.price, r_mga, outcome.total_penalties(), outcome.idle_value,
                             n_primary);
        break;
      case RewardMode::MasMc:
        b = env::step_reward(g.grid_import, g.price, r_mga, outcome.penalties(a.actuators),
                             env::marginal_baseline(outcome.snapshot, a.actuators), n_primary);
        break;
      case RewardMode::SelfInterested: {
        const std::size_t k = a.xmg_index;
        if (k >= outcome.xmg_costs.size()) throw std::invalid_argument("assign_rewards: missing xMG outcome");
        b.r_base = outcome.xmg_grid_only_costs[k];
        b.r_sum = outcome.xmg_grid_only_costs[k] - outcome.xmg_costs[k];
        b.scaled_reward = env::kRewardScale * b.r_sum;
        break;
      }
    }
    out.scaled.push_back(b.scaled_reward);
    out.breakdown.push_back(b);
  }
  return out;
}

std::array<double, env::kEssCount> rbm_policy(const env::EnvConfig& config,
                                              const env::ExogenousRecord& record,
                                              const std::array<double, env::kEssCount>& charges) {
  static constexpr std::array<std::size_t, env::kEssCount> order{2, 0, 1};  // SC, LIB, VRB
  std::array<double, env::kEssCount> action{};
  const double surplus = record.wt_output + record.pv_output - record.demand;
  double remaining = std::abs(surplus);
  if (surplus == 0.0) return action;
  for (std::size_t i : order) {
    if (remaining <= 0.0) break;
    const auto& spec = config.ess[i];
    const double room = surplus > 0.0 ? spec.capacity_max - charges[i] : charges[i];
    const double x = std::max(0.0, std::min({spec.power_max, room, remaining}));
    action[i] = surplus > 0.0 ? x : -x;
    remaining -= x;
  }
  return action;
}

}  // namespace mgrid::ma
