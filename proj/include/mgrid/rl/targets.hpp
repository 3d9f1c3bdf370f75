#pragma once

#include <cstddef>
#include <span>

#include "mgrid/nn/network.hpp"

namespace mgrid::rl {

/// Sum_k gamma^k r_k.
double discounted_return(std::span<const double> rewards, double gamma);

/// Critic-side view of a minibatch for one agent. `critic_actions` holds every
/// action the critic conditions on (the joint action for centralised critics,
/// the agent's own action otherwise); the agent's own action occupies rows
/// [own_action_offset, own_action_offset + own_action_dim).
struct CriticBatch {
  nn::Matrix observations;         // obs_dim x B
  nn::Matrix critic_actions;       // critic_action_dim x B
  Eigen::Index own_action_offset = 0;
  Eigen::Index own_action_dim = 0;
  nn::Vector rewards;              // B
  nn::Vector done;                 // B, 1 for terminal
  nn::Matrix next_observations;    // obs_dim x B
  nn::Matrix next_critic_actions;  // target-policy actions at s'

  Eigen::Index size() const { return observations.cols(); }
};

/// Stacks [observations; actions] as critic input.
nn::Matrix critic_input(const nn::Matrix& observations, const nn::Matrix& actions);

/// y = r + gamma (1 - d) q_next.
nn::Vector bootstrap_target(const nn::Vector& rewards, const nn::Vector& done,
                            const nn::Vector& next_values, double gamma);

/// Overwrites the agent's own slot of next_critic_actions with target_actor(s').
void fill_own_next_actions(CriticBatch& batch, const nn::Network& target_actor);

/// Scalar critic value Q(s, a) for a batch, zero-noise mode.
nn::Vector critic_values(const nn::Network& critic, const nn::Matrix& observations,
                         const nn::Matrix& actions, nn::NoiseMode mode = nn::NoiseMode::Zero);

/// r + gamma (1 - d) Q_target(s', a'), using the batch's next_critic_actions.
nn::Vector ddpg_target(const CriticBatch& batch, const nn::Network& target_critic, double gamma);

/// Convenience form that first fills the own next action from the target actor.
nn::Vector ddpg_target(CriticBatch batch, const nn::Network& target_actor,
                       const nn::Network& target_critic, double gamma);

/// r + gamma (1 - d) min(Q1_target, Q2_target).
nn::Vector td3_target(const CriticBatch& batch, const nn::Network& target_critic_1,
                      const nn::Network& target_critic_2, double gamma);

/// r + gamma (1 - d) max_a Q_target(s', a) for discrete-action Q networks.
nn::Vector dqn_target(const nn::Vector& rewards, const nn::Vector& done,
                      const nn::Matrix& next_q_values, double gamma);

struct LossResult {
  double loss = 0.0;
  nn::Gradients gradients;
};

/// Mean squared error between targets and Q(s, a), with gradients. Uses the
/// critic's frozen noise sample.
LossResult critic_loss(const CriticBatch& batch, const nn::Network& critic, const nn::Vector& targets);

/// Gradient of -mean Q(s, [mu(s) in own slot, batch actions elsewhere]) w.r.t.
/// the actor, i.e. the descent direction that ascends the critic. For
/// distributional critics pass the support so Q = sum d_i z_i.
nn::Gradients actor_gradient(const CriticBatch& batch, const nn::Network& actor,
                             const nn::Network& critic, const nn::Vector* support = nullptr);

/// Per column categorical projection of target-critic distributions.
nn::Matrix project_batch(const nn::Matrix& target_masses, const nn::Vector& support,
                         const nn::Vector& rewards, const nn::Vector& done, double gamma);

/// Mean KL(projected || predicted) over the batch and its critic gradients.
LossResult d3pg_loss(const CriticBatch& batch, const nn::Network& critic,
                     const nn::Matrix& projected);

enum class Td3Phase { CriticOnly, CriticActorTargets };

/// Critic update number `step` (1-based) also updates actor and targets every
/// `period` updates.
Td3Phase td3_update_schedule(std::size_t step, std::size_t period);

}  // namespace mgrid::rl
