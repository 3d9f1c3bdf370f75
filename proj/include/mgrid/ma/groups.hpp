#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mgrid/rl/agents.hpp"
#include "mgrid/rl/replay.hpp"

namespace mgrid::ma {

struct MemberShape {
  std::size_t obs_dim = 0;
  std::size_t action_dim = 0;
};

/// A set of actor-critic learners sharing one joint replay buffer. With
/// centralised critics each critic conditions on its agent's observation and
/// the joint action of every member; otherwise each critic sees only its own
/// action. Actors always read only their own observation.
class ActorCriticGroup {
 public:
  ActorCriticGroup(rl::Algorithm algorithm, std::vector<MemberShape> members, bool centralised,
                   rl::AgentHyperparams hyper, rl::NetworkConfig net, std::uint64_t seed);

  std::size_t size() const { return agents_.size(); }
  bool centralised() const { return centralised_; }
  std::size_t joint_action_dim() const { return joint_action_dim_; }
  std::size_t joint_obs_dim() const { return joint_obs_dim_; }
  std::size_t obs_offset(std::size_t i) const { return obs_offsets_.at(i); }
  std::size_t action_offset(std::size_t i) const { return action_offsets_.at(i); }
  rl::ActorCriticAgent& agent(std::size_t i) { return agents_.at(i); }
  const rl::ActorCriticAgent& agent(std::size_t i) const { return agents_.at(i); }
  rl::ReplayBuffer<rl::Transition>& buffer() { return buffer_; }

  nn::Vector act(std::size_t i, const nn::Vector& observation, rl::ActionMode mode) {
    return agents_.at(i).select_action(observation, mode);
  }
  nn::Vector random_action(std::size_t i) { return agents_.at(i).random_action(); }

  /// Records one step. The transition is completed and stored when the next
  /// step's observations arrive.
  void record(const std::vector<nn::Vector>& observations, const std::vector<nn::Vector>& actions,
              const nn::Vector& rewards);
  /// Drops a pending, incomplete transition.
  void discard_pending() { pending_.reset(); }

  /// One update of every member on a shared uniform minibatch. The target
  /// joint action at s' is assembled from every member's target actor before
  /// any member is updated.
  std::vector<rl::UpdateStats> learn_step();

  /// Critic-side batch for member i built from sampled joint transitions and
  /// a precomputed target joint action.
  rl::CriticBatch member_batch(std::size_t i, const nn::Matrix& states, const nn::Matrix& actions,
                               const nn::Matrix& rewards, const nn::Vector& done,
                               const nn::Matrix& next_states, const nn::Matrix& next_actions) const;

  static nn::Vector stack(const std::vector<nn::Vector>& parts);

 private:
  bool centralised_;
  rl::AgentHyperparams hyper_;
  std::vector<rl::ActorCriticAgent> agents_;
  std::vector<std::size_t> obs_offsets_, obs_dims_, action_offsets_, action_dims_;
  std::size_t joint_obs_dim_ = 0, joint_action_dim_ = 0;
  rl::ReplayBuffer<rl::Transition> buffer_;
  std::optional<rl::Transition> pending_;
};

/// Independent Q-learners that act in a fixed order; each sees the actions
/// already chosen by its predecessors in dedicated observation slots.
class MadqnChain {
 public:
  MadqnChain(std::size_t base_obs_dim, std::size_t agents, std::size_t n_actions,
             rl::AgentHyperparams hyper, rl::NetworkConfig net, std::uint64_t seed);

  std::size_t size() const { return agents_.size(); }
  std::size_t chain_slots() const { return slots_; }
  rl::DqnAgent& agent(std::size_t i) { return agents_.at(i); }
  const rl::DqnAgent& agent(std::size_t i) const { return agents_.at(i); }

  struct Decision {
    std::vector<std::size_t> actions;
    std::vector<nn::Vector> observations;  // augmented, per agent
  };

  /// Chooses actions agent by agent. `levels` maps an action index to the
  /// value written into successors' chain slots.
  Decision decide(const nn::Vector& base_observation, rl::ActionMode mode, bool random,
                  const std::vector<double>& levels);

  void record(const Decision& decision, const std::vector<double>& rewards);
  void discard_pending() { pending_.reset(); }
  std::vector<rl::UpdateStats> learn_step();

 private:
  std::size_t base_obs_dim_, slots_;
  rl::AgentHyperparams hyper_;
  std::vector<rl::DqnAgent> agents_;
  struct Pending {
    Decision decision;
    std::vector<double> rewards;
  };
  std::optional<Pending> pending_;
};

}  // namespace mgrid::ma
