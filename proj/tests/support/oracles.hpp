#pragma once

// Independent reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "mgrid/env/converter.hpp"
#include "mgrid/market/auction.hpp"
#include "mgrid/nn/network.hpp"

namespace oracle {

struct NaiveAuction {
  double revenue = 0.0;
  std::vector<double> allocations;
  std::vector<std::size_t> fill_order;  // agent ids
  double unsold = 0.0;
};

/// Sorts bids once by (price desc, agent id asc) and scans.
inline NaiveAuction naive_auction(const mgrid::market::MgaOffer& offer,
                                  const std::vector<mgrid::market::Bid>& bids, double feed_in,
                                  double share) {
  NaiveAuction out;
  out.allocations.assign(bids.size(), 0.0);
  std::vector<std::size_t> order(bids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (bids[a].price != bids[b].price) return bids[a].price > bids[b].price;
    return bids[a].agent_id < bids[b].agent_id;
  });
  double left = std::max(0.0, offer.sell_volume);
  for (std::size_t i : order) {
    if (left <= 0.0) break;
    if (bids[i].price <= offer.reserve_price) break;  // sorted, nothing later clears
    if (bids[i].volume <= 0.0) continue;
    const double q = std::min(left, bids[i].volume);
    out.revenue += share * bids[i].price * q;
    left -= q;
    out.allocations[i] += q;
    out.fill_order.push_back(bids[i].agent_id);
  }
  out.unsold = left;
  out.revenue += feed_in * left;
  return out;
}

/// Categorical projection written as a sum of triangular kernels: atom i
/// receives p_j * max(0, 1 - |Tz_j - z_i| / dz) from every source atom j.
inline mgrid::nn::Vector kernel_projection(const mgrid::nn::Vector& z, const mgrid::nn::Vector& p,
                                           double r, double gamma, bool done) {
  const auto n = z.size();
  const double lo = z(0), hi = z(n - 1), dz = (hi - lo) / static_cast<double>(n - 1);
  mgrid::nn::Vector m = mgrid::nn::Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double tz = r + (done ? 0.0 : gamma) * z(j);
    tz = std::min(std::max(tz, lo), hi);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = 1.0 - std::abs(tz - z(i)) / dz;
      if (w > 0.0) m(i) += p(j) * w;
    }
  }
  return m;
}

struct NaiveDispatch {
  double loss = std::numeric_limits<double>::infinity();
  double rating = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> subset;
};

/// Recursively builds every subset and keeps the cheapest feasible one.
inline NaiveDispatch naive_dispatch(double power, const std::vector<mgrid::env::ConverterSpec>& inv) {
  NaiveDispatch best;
  const double flow = std::abs(power);
  std::vector<std::size_t> current;
  std::function<void(std::size_t)> visit = [&](std::size_t k) {
    if (k == inv.size()) {
      if (current.empty()) return;
      double rating = 0.0;
      for (std::size_t i : current) rating += inv[i].rated_load;
      if (rating < flow) return;
      double loss = 0.0;
      for (std::size_t i : current) {
        const double share = flow * inv[i].rated_load / rating;
        const double lf = share / inv[i].rated_load;
        const auto& c = inv[i].loss_coefficients;
        double eta = lf > 0.0 ? lf / (lf + c[0] + c[1] * lf + c[2] * lf * lf) : 0.0;
        eta = std::min(std::max(eta, inv[i].efficiency_floor), inv[i].efficiency_ceiling);
        loss += share * (1.0 - eta);
      }
      if (loss < best.loss - 1e-15 || (std::abs(loss - best.loss) <= 1e-15 && rating < best.rating)) {
        best.loss = loss;
        best.rating = rating;
        best.subset = current;
      }
      return;
    }
    visit(k + 1);
    current.push_back(k);
    visit(k + 1);
    current.pop_back();
  };
  visit(0);
  return best;
}

/// Visits every scalar parameter of a network.
template <typename F>
void for_each_parameter(mgrid::nn::NetworkParams& params, F&& f) {
  for (auto& layer : params.layers) {
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) f(layer.weights.data()[i]);
    for (Eigen::Index i = 0; i < layer.biases.size(); ++i) f(layer.biases.data()[i]);
    if (layer.noise) {
      for (Eigen::Index i = 0; i < layer.noise->weights.size(); ++i) f(layer.noise->weights.data()[i]);
      for (Eigen::Index i = 0; i < layer.noise->biases.size(); ++i) f(layer.noise->biases.data()[i]);
    }
  }
}

/// Gradient entries in the same order as for_each_parameter.
inline std::vector<double> flatten(const mgrid::nn::Gradients& g) {
  std::vector<double> out;
  for (const auto& layer : g.layers) {
    out.insert(out.end(), layer.weights.data(), layer.weights.data() + layer.weights.size());
    out.insert(out.end(), layer.biases.data(), layer.biases.data() + layer.biases.size());
    out.insert(out.end(), layer.noise_weights.data(),
               layer.noise_weights.data() + layer.noise_weights.size());
    out.insert(out.end(), layer.noise_biases.data(),
               layer.noise_biases.data() + layer.noise_biases.size());
  }
  return out;
}

/// Central differences of `loss` over every parameter of `params`.
inline std::vector<double> numeric_gradient(mgrid::nn::NetworkParams& params,
                                            const std::function<double()>& loss, double h = 1e-5) {
  std::vector<double> out;
  for_each_parameter(params, [&](double& w) {
    const double keep = w;
    w = keep + h;
    const double up = loss();
    w = keep - h;
    const double down = loss();
    w = keep;
    out.push_back((up - down) / (2.0 * h));
  });
  return out;
}

/// max_i |a_i - n_i| / max(1, |a_i|).
inline double max_relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  if (analytic.size() != numeric.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / std::max(1.0, std::abs(analytic[i])));
  return worst;
}

}  // namespace oracle
