#include "mgrid/rl/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgrid::rl {

nn::Vector make_support(double v_min, double v_max, std::size_t atoms) {
  if (atoms < 2 || !(v_min < v_max)) throw std::invalid_argument("support needs atoms >= 2, v_min < v_max");
  nn::Vector z(static_cast<Eigen::Index>(atoms));
  const double span = v_max - v_min, last = static_cast<double>(atoms - 1);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = v_min + span * static_cast<double>(i) / last;
  return z;
}

double distribution_mean(const ValueDistribution& d) { return d.masses.dot(d.support); }

nn::Vector project_distribution(const ValueDistribution& target, double reward, double gamma,
                                bool done) {
  const auto& z = target.support;
  const Eigen::Index n = z.size();
  if (target.masses.size() != n) throw std::invalid_argument("projection: mass/support mismatch");
  const double v_min = z(0), v_max = z(n - 1);
  const double dz = (v_max - v_min) / static_cast<double>(n - 1);
  const double discount = done ? 0.0 : gamma;

  nn::Vector out = nn::Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double tz = std::clamp(reward + discount * z(j), v_min, v_max);
    const double b = std::clamp((tz - v_min) / dz, 0.0, static_cast<double>(n - 1));
    const auto lower = static_cast<Eigen::Index>(std::floor(b));
    const auto upper = static_cast<Eigen::Index>(std::ceil(b));
    const double p = target.masses(j);
    if (lower == upper) {
      out(lower) += p;
    } else {
      out(lower) += p * (static_cast<double>(upper) - b);
      out(upper) += p * (b - static_cast<double>(lower));
    }
  }
  return out;
}

double kl_divergence(const nn::Vector& p, const nn::Vector& q) {
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) kl += p(i) * (std::log(p(i)) - std::log(std::max(q(i), kProbabilityFloor)));
  return kl;
}

nn::Vector kl_gradient(const nn::Vector& p, const nn::Vector& q) {
  nn::Vector g(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    g(i) = (p(i) > 0.0 && q(i) > kProbabilityFloor) ? -p(i) / q(i) : 0.0;
  return g;
}

}  // namespace mgrid::rl
