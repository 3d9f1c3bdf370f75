#include "mgrid/rl/replay.hpp"

namespace mgrid::rl {

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    Rng& rng) {
  if (count > population) throw std::invalid_argument("cannot sample more items than exist");
  std::vector<std::size_t> out;
  out.reserve(count);
  std::unordered_set<std::size_t> seen;
  seen.reserve(count * 2);
  for (std::size_t j = population - count; j < population; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    if (seen.insert(t).second) {
      out.push_back(t);
    } else {
      seen.insert(j);
      out.push_back(j);
    }
  }
  return out;
}

}  // namespace mgrid::rl
