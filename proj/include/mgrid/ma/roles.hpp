#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mgrid/env/microgrid.hpp"
#include "mgrid/ma/observation.hpp"

namespace mgrid::ma {

enum class Role { EssLib, EssVrb, EssSc, Mga, Xmg, Global };
enum class RewardMode { Sas, MasS, MasMc, SelfInterested };

std::string_view to_string(Role r);
std::string_view to_string(RewardMode m);
RewardMode parse_reward_mode(std::string_view s);

struct ActionBounds {
  double low = -1.0;
  double high = 1.0;
};

/// Affine map from [-1, 1] to [low, high]; inputs outside are clamped.
double scale_action(double a, ActionBounds b);
double unscale_action(double x, ActionBounds b);

struct AgentSpec {
  std::string id;
  Role role = Role::Global;
  std::size_t xmg_index = 0;  // for Role::Xmg
  ObservationSchema schema;
  std::size_t action_dim = 0;
  RewardMode reward_mode = RewardMode::Sas;
  env::ActuatorMask actuators = 0;  // primary-grid elements this agent moves

  bool is_primary() const { return role != Role::Xmg; }
};

/// Agent roster for a case study. SAS runs have one global controller, MAS
/// runs one agent per ESS (plus the aggregator in case 2). Case 2 adds the
/// self-interested external microgrids in both.
std::vector<AgentSpec> build_agents(int case_id, RewardMode mode, int xmg_count);

/// Number of learners optimising the primary objective for reward scaling.
int primary_agent_count(const std::vector<AgentSpec>& agents);

/// Physical action limits for the ESS slot `i`.
ActionBounds ess_bounds(const env::EnvConfig& config, std::size_t i);

/// Upper limit on the aggregator's sell volume at this hour.
double mga_volume_bound(const env::EnvConfig& config, const env::ExogenousRecord& record);

/// Decodes a pair of normalised outputs into an offer.
market::MgaOffer decode_offer(double volume_action, double price_action, const env::EnvConfig& config,
                              const env::ExogenousRecord& record);

/// Decodes a pair of normalised outputs into a bid; volume scales to the cap
/// fraction of primary demand.
market::Bid decode_bid(std::size_t agent_id, double volume_action, double price_action,
                       const env::EnvConfig& config, const env::ExogenousRecord& record);

/// Scaled per-agent rewards plus the currency breakdown behind each one.
struct AgentRewards {
  std::vector<double> scaled;
  std::vector<env::RewardBreakdown> breakdown;
};

/// SAS and MAS-S share the global idle baseline and all penalties; MAS-MC
/// gives each primary agent its own marginal baseline and the penalties of its
/// own storage. External microgrids receive their bill saving against buying
/// everything from the utility.
AgentRewards assign_rewards(const env::StepOutcome& outcome, const std::vector<AgentSpec>& agents);

/// Rule-based storage policy: spend RES surplus charging SC, then LIB, then
/// VRB; cover a deficit by discharging in the same order.
std::array<double, env::kEssCount> rbm_policy(const env::EnvConfig& config,
                                              const env::ExogenousRecord& record,
                                              const std::array<double, env::kEssCount>& charges);

/// Discrete storage actions of the chained Q-learners, as fractions of X_max.
inline constexpr std::array<double, 5> kDqnActionLevels{-1.0, -0.5, 0.0, 0.5, 1.0};

}  // namespace mgrid::ma
