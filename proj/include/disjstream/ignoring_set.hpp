#pragma once

#include <cstdint>
#include <vector>

#include "disjstream/distributions.hpp"

namespace disjstream {

inline constexpr int kMaxExhaustivePlayers = 20;

struct IgnoringSet {
  std::vector<int> players;  // sorted, size ceil(c*k)
  double prob = 0.0;         // Pr[Y_j = 0 for all j in players]
  double bound = 0.0;        // exp(-k/gamma_c - 1)
  double gamma = 0.0;
  double mean_weight = 0.0;  // E[sum Y] / k
  bool precondition_holds = false;  // mean_weight < (1-c)/2
};

// Joint law of k indicator bits: atom = bitmask with bit j set iff Y_j = 1.
// Exhaustive arg-max over subsets of size ceil(c*k); first maximizer in
// increasing-mask order wins ties.
IgnoringSet find_ignoring_set(const FiniteDistribution& joint, int k, double c);

// Same, from samples (each a bitmask), using their empirical law.
IgnoringSet find_ignoring_set(const std::vector<std::uint32_t>& samples, int k, double c);

std::size_t ignoring_set_size(int k, double c);

}  // namespace disjstream
