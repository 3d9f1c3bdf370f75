#include "mgrid/rl/agents.hpp"

#include <stdexcept>

#include "mgrid/common.hpp"

namespace mgrid::rl {

using nn::Matrix;
using nn::Vector;

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Ddpg: return "ddpg";
    case Algorithm::D3pg: return "d3pg";
    case Algorithm::Td3: return "td3";
  }
  return "?";
}

void AgentHyperparams::validate() const {
  if (!(discount >= 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in [0, 1]");
  if (!(soft_update_rate > 0.0 && soft_update_rate <= 1.0))
    throw ConfigError("soft_update_rate must lie in (0, 1]");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (buffer_capacity < batch_size) throw ConfigError("buffer_capacity must be at least batch_size");
  if (actor_update_period == 0) throw ConfigError("actor_update_period must be positive");
  if (atoms < 2) throw ConfigError("atoms must be at least 2");
  if (!(v_min < v_max)) throw ConfigError("v_min must be below v_max");
}

ActorCriticAgent::ActorCriticAgent(Algorithm algorithm, AgentLayout layout, AgentHyperparams hyper,
                                   NetworkConfig net, std::uint64_t seed)
    : algorithm_(algorithm), layout_(layout), hyper_(hyper), net_(std::move(net)), rng_(seed) {
  hyper_.validate();
  if (layout_.own_action_offset + layout_.action_dim > layout_.critic_action_dim)
    throw std::invalid_argument("agent layout: own action slot outside the critic action");

  const auto actor_arch = nn::Architecture::mlp(layout_.obs_dim, net_.actor_hidden, layout_.action_dim,
                                                nn::Activation::Tanh, net_.noisy);
  actor_ = nn::Network(actor_arch, rng_);
  actor_target_ = nn::Network(actor_.params());

  const std::size_t critic_in = layout_.obs_dim + layout_.critic_action_dim;
  const bool distributional = algorithm_ == Algorithm::D3pg;
  const auto critic_arch =
      distributional
          ? nn::Architecture::mlp(critic_in, net_.critic_hidden, hyper_.atoms,
                                  nn::Activation::SoftmaxAtoms, net_.noisy, hyper_.atoms)
          : nn::Architecture::mlp(critic_in, net_.critic_hidden, 1, nn::Activation::Linear, net_.noisy);
  if (distributional) support_ = make_support(hyper_.v_min, hyper_.v_max, hyper_.atoms);

  for (std::size_t i = 0; i < critic_count(); ++i) {
    critics_[i] = nn::Network(critic_arch, rng_);
    critic_targets_[i] = nn::Network(critics_[i].params());
    critic_opts_[i] = nn::Optimizer(net_.optimizer, critics_[i].params());
  }
  actor_opt_ = nn::Optimizer(net_.optimizer, actor_.params());
}

Vector ActorCriticAgent::select_action(const Vector& observation, ActionMode mode) {
  if (static_cast<std::size_t>(observation.size()) != layout_.obs_dim)
    throw std::invalid_argument("select_action: observation size mismatch");
  if (mode == ActionMode::TrainNoisy) {
    actor_.resample_noise(rng_);
    return actor_.forward(observation, nn::NoiseMode::Frozen);
  }
  return actor_.forward(observation, nn::NoiseMode::Zero);
}

Vector ActorCriticAgent::random_action() {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vector a(static_cast<Eigen::Index>(layout_.action_dim));
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = uni(rng_);
  return a;
}

Matrix ActorCriticAgent::target_actions(const Matrix& observations) const {
  return actor_target_.forward(observations, nn::NoiseMode::Zero);
}

UpdateStats ActorCriticAgent::update(const CriticBatch& batch) {
  UpdateStats stats;
  actor_.resample_noise(rng_);
  for (std::size_t i = 0; i < critic_count(); ++i) critics_[i].resample_noise(rng_);

  auto step = [&](nn::Optimizer& opt, nn::Network& net, const nn::Gradients& g, double lr) {
    if (opt.apply_update(net.params(), g, lr) == nn::UpdateStatus::SkippedNonFinite)
      ++stats.skipped_updates;
  };
  const double gamma = hyper_.discount;
  const double tau = hyper_.soft_update_rate;

  if (algorithm_ == Algorithm::D3pg) {
    const Matrix next_in = critic_input(batch.next_observations, batch.next_critic_actions);
    const Matrix target_masses = critic_targets_[0].forward(next_in, nn::NoiseMode::Zero);
    const Matrix projected = project_batch(target_masses, support_, batch.rewards, batch.done, gamma);
    stats.mean_target = (support_.transpose() * projected).mean();
    auto loss = d3pg_loss(batch, critics_[0], projected);
    stats.critic_loss = loss.loss;
    step(critic_opts_[0], critics_[0], loss.gradients, net_.critic_step_size);
  } else {
    const Vector y = algorithm_ == Algorithm::Td3
                         ? td3_target(batch, critic_targets_[0], critic_targets_[1], gamma)
                         : ddpg_target(batch, critic_targets_[0], gamma);
    stats.mean_target = y.mean();
    for (std::size_t i = 0; i < critic_count(); ++i) {
      auto loss = critic_loss(batch, critics_[i], y);
      if (i == 0) stats.critic_loss = loss.loss;
      step(critic_opts_[i], critics_[i], loss.gradients, net_.critic_step_size);
    }
  }
  ++critic_updates_;

  const bool actor_turn =
      algorithm_ != Algorithm::Td3 ||
      td3_update_schedule(critic_updates_, hyper_.actor_update_period) == Td3Phase::CriticActorTargets;
  if (actor_turn) {
    const Vector* support = algorithm_ == Algorithm::D3pg ? &support_ : nullptr;
    const auto grads = actor_gradient(batch, actor_, critics_[0], support);
    step(actor_opt_, actor_, grads, net_.actor_step_size);
    nn::soft_update(actor_target_.params(), actor_.params(), tau);
    for (std::size_t i = 0; i < critic_count(); ++i)
      nn::soft_update(critic_targets_[i].params(), critics_[i].params(), tau);
    stats.actor_updated = true;
  }
  return stats;
}

UpdateStats ActorCriticAgent::learn(std::span<const Transition* const> batch) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  const auto obs = static_cast<Eigen::Index>(layout_.obs_dim);
  const auto act = static_cast<Eigen::Index>(layout_.action_dim);
  if (layout_.critic_action_dim != layout_.action_dim)
    throw std::invalid_argument("learn: single-agent learning needs a local critic");
  CriticBatch b;
  b.observations.resize(obs, n);
  b.critic_actions.resize(act, n);
  b.next_observations.resize(obs, n);
  b.rewards.resize(n);
  b.done.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = *batch[static_cast<std::size_t>(i)];
    b.observations.col(i) = t.state;
    b.critic_actions.col(i) = t.joint_action;
    b.next_observations.col(i) = t.next_state;
    b.rewards(i) = t.rewards(0);
    b.done(i) = t.done ? 1.0 : 0.0;
  }
  b.own_action_offset = 0;
  b.own_action_dim = act;
  b.next_critic_actions = target_actions(b.next_observations);
  return update(b);
}

DqnAgent::DqnAgent(std::size_t obs_dim, std::size_t n_actions, AgentHyperparams hyper,
                   NetworkConfig net, std::uint64_t seed)
    : obs_dim_(obs_dim),
      n_actions_(n_actions),
      hyper_(hyper),
      net_(std::move(net)),
      rng_(seed),
      buffer_(hyper.buffer_capacity, derive_seed(seed, "dqn-replay")) {
  hyper_.validate();
  const auto arch = nn::Architecture::mlp(obs_dim_, net_.critic_hidden, n_actions_,
                                          nn::Activation::Linear, net_.noisy);
  q_ = nn::Network(arch, rng_);
  q_target_ = nn::Network(q_.params());
  opt_ = nn::Optimizer(net_.optimizer, q_.params());
}

std::size_t DqnAgent::select_action(const Vector& observation, ActionMode mode) {
  Vector q;
  if (mode == ActionMode::TrainNoisy) {
    q_.resample_noise(rng_);
    q = q_.forward(observation, nn::NoiseMode::Frozen);
  } else {
    q = q_.forward(observation, nn::NoiseMode::Zero);
  }
  Eigen::Index best = 0;
  q.maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

std::size_t DqnAgent::random_action() {
  std::uniform_int_distribution<std::size_t> pick(0, n_actions_ - 1);
  return pick(rng_);
}

UpdateStats DqnAgent::learn(std::span<const DqnTransition* const> batch) {
  UpdateStats stats;
  const auto n = static_cast<Eigen::Index>(batch.size());
  Matrix obs(static_cast<Eigen::Index>(obs_dim_), n), next(static_cast<Eigen::Index>(obs_dim_), n);
  Vector r(n), d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = *batch[static_cast<std::size_t>(i)];
    obs.col(i) = t.observation;
    next.col(i) = t.next_observation;
    r(i) = t.reward;
    d(i) = t.done ? 1.0 : 0.0;
  }
  const Vector y = dqn_target(r, d, q_target_.forward(next, nn::NoiseMode::Zero), hyper_.discount);
  stats.mean_target = y.mean();

  q_.resample_noise(rng_);
  nn::ForwardCache cache;
  const Matrix q = q_.forward(obs, nn::NoiseMode::Frozen, &cache);
  Matrix upstream = Matrix::Zero(q.rows(), q.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto a = static_cast<Eigen::Index>(batch[static_cast<std::size_t>(i)]->action);
    const double err = y(i) - q(a, i);
    stats.critic_loss += err * err / static_cast<double>(n);
    upstream(a, i) = -2.0 * err / static_cast<double>(n);
  }
  const auto grads = q_.backward(cache, upstream).gradients;
  if (opt_.apply_update(q_.params(), grads, net_.critic_step_size) == nn::UpdateStatus::SkippedNonFinite)
    ++stats.skipped_updates;
  nn::soft_update(q_target_.params(), q_.params(), hyper_.soft_update_rate);
  return stats;
}

}  // namespace mgrid::rl
