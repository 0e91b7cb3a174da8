#include "disjstream/ignoring_set.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace disjstream {

std::size_t ignoring_set_size(int k, double c) {
  if (k < 1) throw InvalidArgument("k must be positive");
  if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("c must lie in (0,1]");
  // Guard against c*k landing a hair above an integer.
  const double ck = c * k;
  const double r = std::round(ck);
  return static_cast<std::size_t>(std::abs(ck - r) < 1e-9 ? r : std::ceil(ck));
}

IgnoringSet find_ignoring_set(const FiniteDistribution& joint, int k, double c) {
  if (k > kMaxExhaustivePlayers)
    throw InvalidArgument("exhaustive ignoring-set search supports k <= " +
                          std::to_string(kMaxExhaustivePlayers));
  const std::size_t s = ignoring_set_size(k, c);
  const std::uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1u);

  // g[T] = Pr[support of Y inside T]; then Pr[Y vanishes on S] = g[~S].
  std::vector<double> g(std::size_t{1} << k, 0.0);
  double weight = 0.0;
  for (const auto& [a, p] : joint.probs()) {
    if (a < 0 || static_cast<std::uint64_t>(a) > full)
      throw InvalidArgument("joint atom is not a " + std::to_string(k) + "-bit mask");
    g[static_cast<std::size_t>(a)] += p;
    weight += p * std::popcount(static_cast<std::uint64_t>(a));
  }
  for (int bit = 0; bit < k; ++bit)
    for (std::size_t m = 0; m < g.size(); ++m)
      if (m & (std::size_t{1} << bit)) g[m] += g[m ^ (std::size_t{1} << bit)];

  IgnoringSet out;
  out.gamma = gamma_c(c);
  out.bound = std::exp(-static_cast<double>(k) / out.gamma - 1.0);
  out.mean_weight = weight / k;
  out.precondition_holds = out.mean_weight < (1.0 - c) / 2.0;
  out.prob = -1.0;
  std::uint32_t best = 0;
  if (s == 0) {
    out.prob = 1.0;
  } else {
    // Gosper's hack over all masks with s bits.
    std::uint64_t m = (std::uint64_t{1} << s) - 1;
    while (m <= full) {
      const double p = g[(~m) & full];
      if (p > out.prob) {
        out.prob = p;
        best = static_cast<std::uint32_t>(m);
      }
      const std::uint64_t low = m & (~m + 1);
      const std::uint64_t ripple = m + low;
      m = (((ripple ^ m) >> 2) / low) | ripple;
    }
  }
  for (int j = 0; j < k; ++j)
    if (best & (1u << j)) out.players.push_back(j);
  if (out.prob > 1.0) out.prob = 1.0;
  return out;
}

IgnoringSet find_ignoring_set(const std::vector<std::uint32_t>& samples, int k, double c) {
  if (samples.empty()) throw InvalidArgument("no samples");
  FiniteDistribution::Map w;
  for (auto m : samples) w[static_cast<Atom>(m)] += 1.0;
  return find_ignoring_set(FiniteDistribution::from_weights(w), k, c);
}

}  // namespace disjstream
