#include "disjstream/distributions.hpp"

#include <cmath>
#include <limits>

namespace disjstream {

FiniteDistribution to_double(const RationalDistribution& d) {
  FiniteDistribution::Map m;
  for (const auto& [a, p] : d.probs()) m[a] = p.convert_to<double>();
  return FiniteDistribution::unchecked(std::move(m));
}

double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q) {
  double s = 0.0;
  for (const auto& [a, pa] : p.probs()) {
    const double qa = q(a);
    if (qa <= 0.0) return std::numeric_limits<double>::infinity();
    s += pa * std::log2(pa / qa);
  }
  return s < 0.0 ? 0.0 : s;
}

double js_divergence(const FiniteDistribution& p, const FiniteDistribution& q) {
  FiniteDistribution::Map mid;
  for (const auto& [a, x] : p.probs()) mid[a] += 0.5 * x;
  for (const auto& [a, x] : q.probs()) mid[a] += 0.5 * x;
  const auto m = FiniteDistribution::unchecked(std::move(mid));
  return 0.5 * (kl_divergence(p, m) + kl_divergence(q, m));
}

nlohmann::json to_json(const FiniteDistribution& d) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [a, p] : d.probs()) j[std::to_string(a)] = p;
  return j;
}

FiniteDistribution distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("distribution JSON must be an object");
  FiniteDistribution::Map m;
  for (const auto& [key, val] : j.items()) {
    std::size_t used = 0;
    Atom a = std::stoll(key, &used);
    if (used != key.size()) throw InvalidArgument("bad atom id: " + key);
    m[a] = val.get<double>();
  }
  return FiniteDistribution(m);
}

}  // namespace disjstream
