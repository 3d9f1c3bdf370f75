#include "mgrid/rl/targets.hpp"

#include <stdexcept>

#include "mgrid/rl/distribution.hpp"

namespace mgrid::rl {

using nn::Matrix;
using nn::Vector;

double discounted_return(std::span<const double> rewards, double gamma) {
  double g = 0.0;
  for (std::size_t k = rewards.size(); k-- > 0;) g = rewards[k] + gamma * g;
  return g;
}

Matrix critic_input(const Matrix& observations, const Matrix& actions) {
  if (observations.cols() != actions.cols())
    throw std::invalid_argument("critic_input: batch sizes differ");
  Matrix in(observations.rows() + actions.rows(), observations.cols());
  in.topRows(observations.rows()) = observations;
  in.bottomRows(actions.rows()) = actions;
  return in;
}

Vector bootstrap_target(const Vector& rewards, const Vector& done, const Vector& next_values,
                        double gamma) {
  return rewards + gamma * (Vector::Ones(done.size()) - done).cwiseProduct(next_values);
}

void fill_own_next_actions(CriticBatch& batch, const nn::Network& target_actor) {
  batch.next_critic_actions.middleRows(batch.own_action_offset, batch.own_action_dim) =
      target_actor.forward(batch.next_observations, nn::NoiseMode::Zero);
}

Vector critic_values(const nn::Network& critic, const Matrix& observations, const Matrix& actions,
                     nn::NoiseMode mode) {
  return critic.forward(critic_input(observations, actions), mode).row(0).transpose();
}

Vector ddpg_target(const CriticBatch& batch, const nn::Network& target_critic, double gamma) {
  const Vector next_q = critic_values(target_critic, batch.next_observations, batch.next_critic_actions);
  return bootstrap_target(batch.rewards, batch.done, next_q, gamma);
}

Vector ddpg_target(CriticBatch batch, const nn::Network& target_actor,
                   const nn::Network& target_critic, double gamma) {
  fill_own_next_actions(batch, target_actor);
  return ddpg_target(static_cast<const CriticBatch&>(batch), target_critic, gamma);
}

Vector td3_target(const CriticBatch& batch, const nn::Network& target_critic_1,
                  const nn::Network& target_critic_2, double gamma) {
  const Vector q1 = critic_values(target_critic_1, batch.next_observations, batch.next_critic_actions);
  const Vector q2 = critic_values(target_critic_2, batch.next_observations, batch.next_critic_actions);
  return bootstrap_target(batch.rewards, batch.done, q1.cwiseMin(q2), gamma);
}

Vector dqn_target(const Vector& rewards, const Vector& done, const Matrix& next_q_values,
                  double gamma) {
  // next_q_values: actions x B
  return bootstrap_target(rewards, done, next_q_values.colwise().maxCoeff().transpose(), gamma);
}

LossResult critic_loss(const CriticBatch& batch, const nn::Network& critic, const Vector& targets) {
  nn::ForwardCache cache;
  const Matrix q = critic.forward(critic_input(batch.observations, batch.critic_actions),
                                  nn::NoiseMode::Frozen, &cache);
  const double n = static_cast<double>(batch.size());
  const Vector err = targets - q.row(0).transpose();
  LossResult out;
  out.loss = err.squaredNorm() / n;
  Matrix upstream = (-2.0 / n) * err.transpose();
  out.gradients = critic.backward(cache, upstream).gradients;
  return out;
}

nn::Gradients actor_gradient(const CriticBatch& batch, const nn::Network& actor,
                             const nn::Network& critic, const Vector* support) {
  nn::ForwardCache actor_cache;
  const Matrix mu = actor.forward(batch.observations, nn::NoiseMode::Frozen, &actor_cache);
  Matrix actions = batch.critic_actions;
  actions.middleRows(batch.own_action_offset, batch.own_action_dim) = mu;

  nn::ForwardCache critic_cache;
  const Matrix out = critic.forward(critic_input(batch.observations, actions),
                                    nn::NoiseMode::Frozen, &critic_cache);
  const double n = static_cast<double>(batch.size());
  Matrix upstream;
  if (support) {
    // Q = sum_i d_i z_i
    upstream = (-1.0 / n) * support->replicate(1, out.cols());
  } else {
    upstream = Matrix::Constant(1, out.cols(), -1.0 / n);
  }
  const auto critic_back = critic.backward(critic_cache, upstream);
  const Eigen::Index obs_rows = batch.observations.rows();
  const Matrix dq_da =
      critic_back.input_gradient.middleRows(obs_rows + batch.own_action_offset, batch.own_action_dim);
  return actor.backward(actor_cache, dq_da).gradients;
}

Matrix project_batch(const Matrix& target_masses, const Vector& support, const Vector& rewards,
                     const Vector& done, double gamma) {
  Matrix out(target_masses.rows(), target_masses.cols());
  for (Eigen::Index b = 0; b < target_masses.cols(); ++b) {
    ValueDistribution d{support, target_masses.col(b)};
    out.col(b) = project_distribution(d, rewards(b), gamma, done(b) > 0.5);
  }
  return out;
}

LossResult d3pg_loss(const CriticBatch& batch, const nn::Network& critic, const Matrix& projected) {
  nn::ForwardCache cache;
  const Matrix q = critic.forward(critic_input(batch.observations, batch.critic_actions),
                                  nn::NoiseMode::Frozen, &cache);
  const double n = static_cast<double>(batch.size());
  LossResult out;
  Matrix upstream(q.rows(), q.cols());
  for (Eigen::Index b = 0; b < q.cols(); ++b) {
    out.loss += kl_divergence(projected.col(b), q.col(b));
    upstream.col(b) = kl_gradient(projected.col(b), q.col(b)) / n;
  }
  out.loss /= n;
  out.gradients = critic.backward(cache, upstream).gradients;
  return out;
}

Td3Phase td3_update_schedule(std::size_t step, std::size_t period) {
  if (period == 0) throw std::invalid_argument("td3 period must be positive");
  return step % period == 0 ? Td3Phase::CriticActorTargets : Td3Phase::CriticOnly;
}

}  // namespace mgrid::rl
