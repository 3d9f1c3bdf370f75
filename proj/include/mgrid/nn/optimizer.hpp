#pragma once

#include "mgrid/nn/network.hpp"

namespace mgrid::nn {

enum class OptimizerKind { Sgd, Adam };

enum class UpdateStatus { Applied, SkippedNonFinite };

/// First-order update with optional adaptive moments (Adam).
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerKind kind, const NetworkParams& shape, double beta1 = 0.9,
            double beta2 = 0.999, double epsilon = 1e-8);

  /// Moves params against grads. A non-finite gradient leaves both the
  /// parameters and the moment estimates untouched.
  [[nodiscard]] UpdateStatus apply_update(NetworkParams& params, const Gradients& grads,
                                          double step_size);

  long steps() const { return steps_; }
  OptimizerKind kind() const { return kind_; }

 private:
  OptimizerKind kind_ = OptimizerKind::Adam;
  double beta1_ = 0.9, beta2_ = 0.999, epsilon_ = 1e-8;
  long steps_ = 0;
  Gradients first_;
  Gradients second_;
};

}  // namespace mgrid::nn
