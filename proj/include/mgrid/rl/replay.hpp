#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "mgrid/common.hpp"
#include "mgrid/nn/network.hpp"

namespace mgrid::rl {

/// One joint step: s, a (all agents, normalised to [-1, 1]), r (one entry per
/// agent), s', done.
struct Transition {
  nn::Vector state;
  nn::Vector joint_action;
  nn::Vector rewards;
  nn::Vector next_state;
  bool done = false;
};

/// Distinct indices drawn uniformly from [0, population) (Floyd's algorithm).
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    Rng& rng);

/// Fixed-capacity FIFO store with uniform minibatch sampling.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity, std::uint64_t seed = 0)
      : capacity_(capacity), rng_(seed) {
    if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity, 1u << 16));
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[head_] = std::move(item);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// Element i in insertion order, 0 = oldest retained.
  const T& at(std::size_t i) const { return items_[(head_ + i) % items_.size()]; }

  std::vector<std::size_t> sample_indices(std::size_t batch) {
    if (batch > items_.size()) throw std::invalid_argument("batch larger than buffer contents");
    return sample_without_replacement(items_.size(), batch, rng_);
  }

  std::vector<const T*> sample(std::size_t batch) {
    std::vector<const T*> out;
    for (std::size_t i : sample_indices(batch)) out.push_back(&items_[i]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<T> items_;
  Rng rng_;
};

}  // namespace mgrid::rl
