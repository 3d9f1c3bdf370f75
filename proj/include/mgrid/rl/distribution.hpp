#pragma once

#include <cstddef>

#include "mgrid/nn/network.hpp"

namespace mgrid::rl {

/// Categorical return distribution on a fixed, equally spaced support.
struct ValueDistribution {
  nn::Vector support;
  nn::Vector masses;
};

/// z_i = v_min + i * (v_max - v_min) / (atoms - 1), i = 0..atoms-1.
nn::Vector make_support(double v_min, double v_max, std::size_t atoms);

/// Sum_i d_i z_i.
double distribution_mean(const ValueDistribution& d);

/// Categorical projection of r + gamma (1 - done) Z onto the support of `target`.
/// Each shifted atom is clamped to [v_min, v_max] and its mass split linearly
/// between its two neighbouring atoms.
nn::Vector project_distribution(const ValueDistribution& target, double reward, double gamma,
                                bool done);

inline constexpr double kProbabilityFloor = 1e-12;

/// KL(projected || predicted) with predicted masses floored at 1e-12.
double kl_divergence(const nn::Vector& projected, const nn::Vector& predicted);

/// d KL / d predicted, consistent with the floor.
nn::Vector kl_gradient(const nn::Vector& projected, const nn::Vector& predicted);

}  // namespace mgrid::rl
