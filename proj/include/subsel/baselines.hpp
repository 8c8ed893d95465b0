#pragma once

#include "subsel/generators.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

namespace subsel {

/// k distinct indices drawn uniformly from 0..n-1 (partial Fisher-Yates),
/// in draw order.
inline std::vector<Index> random_subset(Index n, Index k, RngSeed seed) {
  if (k < 0 || n < 0 || k > n) {
    throw std::invalid_argument("random_subset: need 0 <= k <= n, got k=" + std::to_string(k) +
                                " n=" + std::to_string(n));
  }
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  Rng rng(seed);
  for (Index t = 0; t < k; ++t) {
    const auto pick = t + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - t)));
    std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(pick)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

/// Seed stream of the random baseline, decoupled from the instance seed.
constexpr RngSeed baseline_seed(std::uint64_t instance_seed) {
  return RngSeed{mix_seed(instance_seed ^ 0x7261'6e64'636f'6c73ull)};
}

}  // namespace subsel
