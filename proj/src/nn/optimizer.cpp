#include "mgrid/nn/optimizer.hpp"

#include <cmath>

namespace mgrid::nn {

Optimizer::Optimizer(OptimizerKind kind, const NetworkParams& shape, double beta1, double beta2,
                     double epsilon)
    : kind_(kind), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  if (kind_ == OptimizerKind::Adam) {
    first_ = Gradients::zeros_like(shape);
    second_ = Gradients::zeros_like(shape);
  }
}

UpdateStatus Optimizer::apply_update(NetworkParams& params, const Gradients& grads, double step_size) {
  if (!grads.all_finite()) return UpdateStatus::SkippedNonFinite;
  if (grads.layers.size() != params.layers.size())
    throw std::invalid_argument("apply_update: gradient shape mismatch");

  if (kind_ == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
      auto& p = params.layers[i];
      const auto& g = grads.layers[i];
      p.weights -= step_size * g.weights;
      p.biases -= step_size * g.biases;
      if (p.noise) {
        p.noise->weights -= step_size * g.noise_weights;
        p.noise->biases -= step_size * g.noise_biases;
      }
    }
    ++steps_;
    return UpdateStatus::Applied;
  }

  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  const double b1 = beta1_, b2 = beta2_, eps = epsilon_;
  auto adam = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * grad;
    v = (b2 * v.array() + (1.0 - b2) * grad.array().square()).matrix();
    param.array() -= step_size * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    auto& p = params.layers[i];
    const auto& g = grads.layers[i];
    auto& m = first_.layers[i];
    auto& v = second_.layers[i];
    adam(p.weights, g.weights, m.weights, v.weights);
    adam(p.biases, g.biases, m.biases, v.biases);
    if (p.noise) {
      adam(p.noise->weights, g.noise_weights, m.noise_weights, v.noise_weights);
      adam(p.noise->biases, g.noise_biases, m.noise_biases, v.noise_biases);
    }
  }
  return UpdateStatus::Applied;
}

}  // namespace mgrid::nn
