#include "mgrid/ma/groups.hpp"

#include <stdexcept>
#include <string>

#include "mgrid/common.hpp"

namespace mgrid::ma {

using nn::Matrix;
using nn::Vector;

ActorCriticGroup::ActorCriticGroup(rl::Algorithm algorithm, std::vector<MemberShape> members,
                                   bool centralised, rl::AgentHyperparams hyper, rl::NetworkConfig net,
                                   std::uint64_t seed)
    : centralised_(centralised),
      hyper_(hyper),
      buffer_(hyper.buffer_capacity, derive_seed(seed, "joint-replay")) {
  if (members.empty()) throw std::invalid_argument("ActorCriticGroup: no members");
  for (const auto& m : members) {
    obs_offsets_.push_back(joint_obs_dim_);
    obs_dims_.push_back(m.obs_dim);
    action_offsets_.push_back(joint_action_dim_);
    action_dims_.push_back(m.action_dim);
    joint_obs_dim_ += m.obs_dim;
    joint_action_dim_ += m.action_dim;
  }
  agents_.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const rl::AgentLayout layout =
        centralised_ ? rl::AgentLayout{members[i].obs_dim, members[i].action_dim, joint_action_dim_,
                                       action_offsets_[i]}
                     : rl::AgentLayout::local(members[i].obs_dim, members[i].action_dim);
    agents_.emplace_back(algorithm, layout, hyper, net, derive_seed(seed, "agent-" + std::to_string(i)));
  }
}

Vector ActorCriticGroup::stack(const std::vector<Vector>& parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.size();
  Vector out(n);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

void ActorCriticGroup::record(const std::vector<Vector>& observations, const std::vector<Vector>& actions,
                              const Vector& rewards) {
  if (observations.size() != size() || actions.size() != size() ||
      static_cast<std::size_t>(rewards.size()) != size())
    throw std::invalid_argument("ActorCriticGroup::record: one entry per member required");
  Vector state = stack(observations);
  if (pending_) {
    pending_->next_state = state;
    buffer_.push(std::move(*pending_));
  }
  pending_ = rl::Transition{std::move(state), stack(actions), rewards, Vector(), false};
}

rl::CriticBatch ActorCriticGroup::member_batch(std::size_t i, const Matrix& states, const Matrix& actions,
                                               const Matrix& rewards, const Vector& done,
                                               const Matrix& next_states, const Matrix& next_actions) const {
  const auto oo = static_cast<Eigen::Index>(obs_offsets_[i]);
  const auto od = static_cast<Eigen::Index>(obs_dims_[i]);
  const auto ao = static_cast<Eigen::Index>(action_offsets_[i]);
  const auto ad = static_cast<Eigen::Index>(action_dims_[i]);
  rl::CriticBatch b;
  b.observations = states.middleRows(oo, od);
  b.next_observations = next_states.middleRows(oo, od);
  b.rewards = rewards.row(static_cast<Eigen::Index>(i)).transpose();
  b.done = done;
  b.own_action_dim = ad;
  if (centralised_) {
    b.critic_actions = actions;
    b.next_critic_actions = next_actions;
    b.own_action_offset = ao;
  } else {
    b.critic_actions = actions.middleRows(ao, ad);
    b.next_critic_actions = next_actions.middleRows(ao, ad);
    b.own_action_offset = 0;
  }
  return b;
}

std::vector<rl::UpdateStats> ActorCriticGroup::learn_step() {
  const std::size_t batch = hyper_.batch_size;
  if (buffer_.size() < batch) return {};
  const auto sample = buffer_.sample(batch);
  const auto n = static_cast<Eigen::Index>(batch);
  Matrix states(static_cast<Eigen::Index>(joint_obs_dim_), n), next(static_cast<Eigen::Index>(joint_obs_dim_), n);
  Matrix actions(static_cast<Eigen::Index>(joint_action_dim_), n);
  Matrix rewards(static_cast<Eigen::Index>(size()), n);
  Vector done(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& t = *sample[static_cast<std::size_t>(c)];
    states.col(c) = t.state;
    next.col(c) = t.next_state;
    actions.col(c) = t.joint_action;
    rewards.col(c) = t.rewards;
    done(c) = t.done ? 1.0 : 0.0;
  }
  Matrix next_actions(actions.rows(), n);
  for (std::size_t i = 0; i < size(); ++i) {
    next_actions.middleRows(static_cast<Eigen::Index>(action_offsets_[i]), static_cast<Eigen::Index>(action_dims_[i])) =
        agents_[i].target_actions(next.middleRows(static_cast<Eigen::Index>(obs_offsets_[i]),
                                                  static_cast<Eigen::Index>(obs_dims_[i])));
  }
  std::vector<rl::UpdateStats> stats;
  stats.reserve(size());
  for (std::size_t i = 0; i < size(); ++i)
    stats.push_back(agents_[i].update(member_batch(i, states, actions, rewards, done, next, next_actions)));
  return stats;
}

MadqnChain::MadqnChain(std::size_t base_obs_dim, std::size_t agents, std::size_t n_actions,
                       rl::AgentHyperparams hyper, rl::NetworkConfig net, std::uint64_t seed)
    : base_obs_dim_(base_obs_dim), slots_(agents > 0 ? agents - 1 : 0), hyper_(hyper) {
  if (agents == 0) throw std::invalid_argument("MadqnChain: no agents");
  agents_.reserve(agents);
  for (std::size_t i = 0; i < agents; ++i)
    agents_.emplace_back(base_obs_dim_ + slots_, n_actions, hyper, net,
                         derive_seed(seed, "dqn-agent-" + std::to_string(i)));
}

MadqnChain::Decision MadqnChain::decide(const Vector& base_observation, rl::ActionMode mode, bool random,
                                        const std::vector<double>& levels) {
  if (static_cast<std::size_t>(base_observation.size()) != base_obs_dim_)
    throw std::invalid_argument("MadqnChain::decide: observation size mismatch");
  Decision d;
  Vector obs = Vector::Zero(static_cast<Eigen::Index>(base_obs_dim_ + slots_));
  obs.head(static_cast<Eigen::Index>(base_obs_dim_)) = base_observation;
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    d.observations.push_back(obs);
    const std::size_t a = random ? agents_[k].random_action() : agents_[k].select_action(obs, mode);
    d.actions.push_back(a);
    if (k < slots_) obs(static_cast<Eigen::Index>(base_obs_dim_ + k)) = levels.at(a);
  }
  return d;
}

void MadqnChain::record(const Decision& decision, const std::vector<double>& rewards) {
  if (pending_) {
    for (std::size_t k = 0; k < agents_.size(); ++k) {
      agents_[k].buffer().push(rl::DqnTransition{pending_->decision.observations[k], pending_->decision.actions[k],
                                                 pending_->rewards[k], decision.observations[k], false});
    }
  }
  pending_ = Pending{decision, rewards};
}

std::vector<rl::UpdateStats> MadqnChain::learn_step() {
  std::vector<rl::UpdateStats> out;
  for (auto& a : agents_) {
    if (a.buffer().size() < hyper_.batch_size) continue;
    const auto batch = a.buffer().sample(hyper_.batch_size);
    out.push_back(a.learn(batch));
  }
  return out;
}

}  // namespace mgrid::ma
