#pragma once

#include <cstddef>
#include <vector>

#include "mgrid/nn/optimizer.hpp"

namespace mgrid::rl {

struct AgentHyperparams {
  double discount = 0.99;
  double soft_update_rate = 0.005;
  std::size_t batch_size = 128;
  std::size_t buffer_capacity = 50000;
  std::size_t warmup_random_steps = 1000;
  std::size_t learn_start_step = 500;
  std::size_t actor_update_period = 2;  // TD3 delay
  std::size_t atoms = 51;
  double v_min = -1.0;
  double v_max = 1.0;

  void validate() const;
};

struct NetworkConfig {
  std::vector<std::size_t> actor_hidden{128, 128};
  std::vector<std::size_t> critic_hidden{128, 128};
  bool noisy = true;
  double actor_step_size = 1e-4;
  double critic_step_size = 1e-3;
  nn::OptimizerKind optimizer = nn::OptimizerKind::Adam;
};

}  // namespace mgrid::rl
