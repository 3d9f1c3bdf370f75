#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "mgrid/nn/network.hpp"
#include "mgrid/nn/optimizer.hpp"
#include "mgrid/rl/distribution.hpp"
#include "mgrid/rl/hyperparams.hpp"
#include "mgrid/rl/replay.hpp"
#include "mgrid/rl/targets.hpp"

namespace mgrid::rl {

enum class Algorithm { Ddpg, D3pg, Td3 };

std::string_view to_string(Algorithm a);

enum class ActionMode { TrainNoisy, EvalZeroNoise };

/// Dimensions of one actor-critic agent. For a local critic the critic action
/// is the agent's own action (offset 0); for a centralised critic it is the
/// joint action of every agent.
struct AgentLayout {
  std::size_t obs_dim = 0;
  std::size_t action_dim = 0;
  std::size_t critic_action_dim = 0;
  std::size_t own_action_offset = 0;

  static AgentLayout local(std::size_t obs_dim, std::size_t action_dim) {
    return {obs_dim, action_dim, action_dim, 0};
  }
};

struct UpdateStats {
  double critic_loss = 0.0;
  double mean_target = 0.0;
  bool actor_updated = false;
  int skipped_updates = 0;
};

/// DDPG and its distributional (D3PG) and twin-delayed (TD3) variants with
/// NoisyNet exploration. Actor outputs lie in [-1, 1].
class ActorCriticAgent {
 public:
  ActorCriticAgent(Algorithm algorithm, AgentLayout layout, AgentHyperparams hyper,
                   NetworkConfig net, std::uint64_t seed);

  Algorithm algorithm() const { return algorithm_; }
  const AgentLayout& layout() const { return layout_; }
  const AgentHyperparams& hyperparams() const { return hyper_; }

  /// Train mode draws a fresh actor noise sample per call; eval mode uses the
  /// mean network and is deterministic.
  nn::Vector select_action(const nn::Vector& observation, ActionMode mode);
  nn::Vector random_action();

  /// Target-policy actions (zero noise) for a batch of observations.
  nn::Matrix target_actions(const nn::Matrix& observations) const;

  /// One learning step on a prepared batch whose next_critic_actions already
  /// hold every agent's target-policy action.
  UpdateStats update(const CriticBatch& batch);

  /// Single-agent learning step: state is the observation, the joint action is
  /// the agent's own action and reward index 0 is used.
  UpdateStats learn(std::span<const Transition* const> batch);

  const nn::Network& actor() const { return actor_; }
  const nn::Network& actor_target() const { return actor_target_; }
  const nn::Network& critic(std::size_t i = 0) const { return critics_.at(i); }
  const nn::Network& critic_target(std::size_t i = 0) const { return critic_targets_.at(i); }
  /// Mutable online networks, for restoring checkpoints.
  nn::Network& actor() { return actor_; }
  nn::Network& critic(std::size_t i = 0) { return critics_.at(i); }
  std::size_t critic_count() const { return algorithm_ == Algorithm::Td3 ? 2 : 1; }
  std::size_t critic_updates() const { return critic_updates_; }
  const nn::Vector& support() const { return support_; }

 private:
  Algorithm algorithm_;
  AgentLayout layout_;
  AgentHyperparams hyper_;
  NetworkConfig net_;
  Rng rng_;
  nn::Network actor_, actor_target_;
  std::array<nn::Network, 2> critics_, critic_targets_;
  nn::Optimizer actor_opt_;
  std::array<nn::Optimizer, 2> critic_opts_;
  nn::Vector support_;
  std::size_t critic_updates_ = 0;
};

struct DqnTransition {
  nn::Vector observation;
  std::size_t action = 0;
  double reward = 0.0;
  nn::Vector next_observation;
  bool done = false;
};

/// Independent deep Q-learner over a small discrete action set.
class DqnAgent {
 public:
  DqnAgent(std::size_t obs_dim, std::size_t n_actions, AgentHyperparams hyper, NetworkConfig net,
           std::uint64_t seed);

  std::size_t select_action(const nn::Vector& observation, ActionMode mode);
  std::size_t random_action();
  UpdateStats learn(std::span<const DqnTransition* const> batch);

  ReplayBuffer<DqnTransition>& buffer() { return buffer_; }
  const nn::Network& q_network() const { return q_; }
  std::size_t n_actions() const { return n_actions_; }

 private:
  std::size_t obs_dim_, n_actions_;
  AgentHyperparams hyper_;
  NetworkConfig net_;
  Rng rng_;
  nn::Network q_, q_target_;
  nn::Optimizer opt_;
  ReplayBuffer<DqnTransition> buffer_;
};

}  // namespace mgrid::rl
