#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "disjstream/errors.hpp"

namespace disjstream {

using Atom = std::int64_t;
using Rational = boost::multiprecision::cpp_rational;

// Atoms reserved for the arbitrary parts of a decomposition. Callers use
// nonnegative atom ids only.
inline constexpr Atom kFreshZeroAtom = -1;
inline constexpr Atom kFreshOneAtom = -2;
inline constexpr Atom kFreshCommonAtom = -3;

namespace detail {
template <typename Real>
struct RealTraits {
  static bool approx_one(const Real& s) { return std::abs(s - Real(1)) <= Real(1e-12); }
  static double to_double(const Real& x) { return static_cast<double>(x); }
};
template <>
struct RealTraits<Rational> {
  static bool approx_one(const Rational& s) { return s == 1; }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
};
}  // namespace detail

// Finite distribution over integer atoms. Only atoms with positive mass are
// stored, so support() is the key set.
template <typename Real>
class BasicDistribution {
 public:
  using Map = std::map<Atom, Real>;

  BasicDistribution() = default;

  // Validates nonnegativity and total mass (1e-12 for doubles, exact for
  // rationals).
  explicit BasicDistribution(const Map& probs) {
    Real total(0);
    for (const auto& [a, p] : probs) {
      if (p < 0) throw InvalidArgument("negative probability on atom " + std::to_string(a));
      if (p > 0) probs_.emplace(a, p);
      total += p;
    }
    if (!detail::RealTraits<Real>::approx_one(total))
      throw InvalidArgument("probabilities must sum to 1");
  }

  static BasicDistribution point(Atom a) {
    BasicDistribution d;
    d.probs_.emplace(a, Real(1));
    return d;
  }

  // Normalizes nonnegative weights with a positive total.
  static BasicDistribution from_weights(const Map& weights) {
    Real total(0);
    for (const auto& [a, w] : weights) {
      if (w < 0) throw InvalidArgument("negative weight");
      total += w;
    }
    if (!(total > 0)) throw InvalidArgument("weights must have positive total");
    BasicDistribution d;
    for (const auto& [a, w] : weights)
      if (w > 0) d.probs_.emplace(a, w / total);
    return d;
  }

  // Stores the given masses as is; for builders that already guarantee
  // normalization up to rounding.
  static BasicDistribution unchecked(Map probs) {
    BasicDistribution d;
    for (auto& [a, p] : probs)
      if (p > 0) d.probs_.emplace(a, std::move(p));
    return d;
  }

  Real operator()(Atom a) const {
    auto it = probs_.find(a);
    return it == probs_.end() ? Real(0) : it->second;
  }

  std::vector<Atom> support() const {
    std::vector<Atom> out;
    out.reserve(probs_.size());
    for (const auto& kv : probs_) out.push_back(kv.first);
    return out;
  }

  const Map& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  bool empty() const { return probs_.empty(); }

  Real total() const {
    Real t(0);
    for (const auto& kv : probs_) t += kv.second;
    return t;
  }

  friend bool operator==(const BasicDistribution& a, const BasicDistribution& b) {
    return a.probs_ == b.probs_;
  }

 private:
  Map probs_;
};

using FiniteDistribution = BasicDistribution<double>;
using RationalDistribution = BasicDistribution<Rational>;

FiniteDistribution to_double(const RationalDistribution& d);

template <typename Real>
struct BasicDecomposition {
  BasicDistribution<Real> common;
  BasicDistribution<Real> zeroPart;
  BasicDistribution<Real> onePart;
  Real delta{0};
  Real alpha{0};
};

using Decomposition = BasicDecomposition<double>;
using RationalDecomposition = BasicDecomposition<Rational>;

// Half the L1 distance. Atoms missing from one side count as probability 0.
template <typename Real>
Real tv_distance(const BasicDistribution<Real>& p, const BasicDistribution<Real>& q) {
  Real s(0);
  auto ip = p.probs().begin(), iq = q.probs().begin();
  const auto ep = p.probs().end(), eq = q.probs().end();
  while (ip != ep || iq != eq) {
    if (iq == eq || (ip != ep && ip->first < iq->first)) {
      s += ip->second;
      ++ip;
    } else if (ip == ep || iq->first < ip->first) {
      s += iq->second;
      ++iq;
    } else {
      Real d = ip->second - iq->second;
      s += d < 0 ? Real(-d) : d;
      ++ip;
      ++iq;
    }
  }
  Real half = s / 2;
  if (half > 1) half = 1;
  return half;
}

// KL(p || q) in bits; +infinity when p puts mass outside support(q).
double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q);

// Jensen-Shannon divergence in bits, taken against the midpoint (p+q)/2.
double js_divergence(const FiniteDistribution& p, const FiniteDistribution& q);

// Writes d0 = (1-a)(1-delta) D + (1-(1-a)(1-delta)) D0' and
// d1 = (1-delta) D + delta D1' with D0', D1' of disjoint supports.
template <typename Real>
BasicDecomposition<Real> decompose(const BasicDistribution<Real>& d0,
                                   const BasicDistribution<Real>& d1, const Real& alpha) {
  using Dist = BasicDistribution<Real>;
  if (!(alpha >= 0 && alpha <= 1)) throw InvalidArgument("alpha must lie in [0,1]");
  BasicDecomposition<Real> out;
  out.alpha = alpha;
  if (alpha == 1) {
    out.delta = 0;
    out.common = d1;
    out.zeroPart = d0;
    out.onePart = Dist::point(kFreshOneAtom);
    return out;
  }
  const Real keep = Real(1) - alpha;
  typename Dist::Map overlap, excess0, excess1;
  Real ov(0), ex0(0), ex1(0);
  auto visit = [&](Atom a, const Real& p0, const Real& p1) {
    Real scaled = p0 / keep;
    // One comparison decides the side so the two excess parts stay disjoint.
    if (scaled > p1) {
      if (p1 > 0) {
        overlap[a] = p1;
        ov += p1;
      }
      Real e = p0 - keep * p1;
      if (e > 0) {
        excess0[a] = e;
        ex0 += e;
      }
    } else {
      if (scaled > 0) {
        overlap[a] = scaled;
        ov += scaled;
      }
      Real e = p1 - scaled;
      if (e > 0) {
        excess1[a] = e;
        ex1 += e;
      }
    }
  };
  auto i0 = d0.probs().begin(), i1 = d1.probs().begin();
  const auto e0 = d0.probs().end(), e1 = d1.probs().end();
  while (i0 != e0 || i1 != e1) {
    if (i1 == e1 || (i0 != e0 && i0->first < i1->first)) {
      visit(i0->first, i0->second, Real(0));
      ++i0;
    } else if (i0 == e0 || i1->first < i0->first) {
      visit(i1->first, Real(0), i1->second);
      ++i1;
    } else {
      visit(i0->first, i0->second, i1->second);
      ++i0;
      ++i1;
    }
  }
  Real delta = ex1;
  // Pin the degenerate ends exactly so rounding never weights a fresh atom.
  if (ov == 0) delta = 1;
  if (ex1 == 0) delta = 0;
  if (delta > 1) delta = 1;
  if (delta < 0) delta = 0;
  out.delta = delta;

  auto normalized = [](typename Dist::Map m, const Real& total) {
    for (auto& kv : m) kv.second /= total;
    return Dist::unchecked(std::move(m));
  };
  out.common = ov > 0 ? normalized(std::move(overlap), ov) : Dist::point(kFreshCommonAtom);
  out.zeroPart = ex0 > 0 ? normalized(std::move(excess0), ex0) : Dist::point(kFreshZeroAtom);
  out.onePart = ex1 > 0 ? normalized(std::move(excess1), ex1) : Dist::point(kFreshOneAtom);
  return out;
}

inline double gamma_c(double c) {
  if (!(c > 0 && c <= 1)) throw InvalidArgument("c must lie in (0,1]");
  return 1.0 / (c * std::log(std::exp(1.0) / c));
}

nlohmann::json to_json(const FiniteDistribution& d);
FiniteDistribution distribution_from_json(const nlohmann::json& j);

}  // namespace disjstream
