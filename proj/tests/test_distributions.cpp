#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "disjstream/distributions.hpp"

using namespace disjstream;

namespace {

FiniteDistribution dist(std::initializer_list<std::pair<const Atom, double>> xs) {
  return FiniteDistribution(std::map<Atom, double>(xs));
}

// Random distribution on [0, support) with some atoms forced to zero.
FiniteDistribution random_dist(std::mt19937_64& rng, int support, double zero_prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<Atom, double> w;
  for (int a = 0; a < support; ++a)
    if (u(rng) >= zero_prob) w[a] = u(rng);
  if (w.empty()) w[0] = 1.0;
  return FiniteDistribution::from_weights(w);
}

double oracle_tv(const FiniteDistribution& p, const FiniteDistribution& q) {
  std::set<Atom> atoms;
  for (auto a : p.support()) atoms.insert(a);
  for (auto a : q.support()) atoms.insert(a);
  double s = 0.0;
  for (auto a : atoms) s += std::abs(p(a) - q(a));
  return 0.5 * s;
}

}  // namespace

TEST(Distribution, RejectsBadMass) {
  EXPECT_THROW(dist({{0, 0.5}, {1, 0.4}}), InvalidArgument);
  EXPECT_THROW(dist({{0, -0.1}, {1, 1.1}}), InvalidArgument);
  EXPECT_NO_THROW(dist({{0, 0.5}, {1, 0.5}, {2, 0.0}}));
}

TEST(Distribution, SupportDropsZeroAtoms) {
  auto d = dist({{0, 0.5}, {1, 0.5}, {2, 0.0}});
  EXPECT_EQ(d.support(), (std::vector<Atom>{0, 1}));
  EXPECT_EQ(d(2), 0.0);
  EXPECT_EQ(d(99), 0.0);
}

TEST(Distribution, JsonRoundTrip) {
  auto d = dist({{3, 0.25}, {7, 0.75}});
  EXPECT_EQ(distribution_from_json(to_json(d)), d);
}

TEST(TvDistance, KnownValues) {
  auto p = dist({{0, 0.3}, {1, 0.7}});
  EXPECT_DOUBLE_EQ(tv_distance(p, p), 0.0);
  EXPECT_DOUBLE_EQ(tv_distance(FiniteDistribution::point(1), FiniteDistribution::point(2)), 1.0);
  EXPECT_NEAR(tv_distance(dist({{0, 0.5}, {1, 0.5}}), dist({{0, 0.25}, {1, 0.75}})), 0.25, 1e-15);
}

TEST(TvDistance, MetricOnRandomTriples) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    auto p = random_dist(rng, 8, 0.3), q = random_dist(rng, 8, 0.3), r = random_dist(rng, 8, 0.3);
    const double pq = tv_distance(p, q);
    EXPECT_NEAR(pq, oracle_tv(p, q), 1e-12);
    EXPECT_NEAR(pq, tv_distance(q, p), 1e-15);
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, 1.0 + 1e-12);
    EXPECT_LE(pq, tv_distance(p, r) + tv_distance(r, q) + 1e-12);
  }
}

TEST(Divergence, KlAndJsSpotValues) {
  auto p = dist({{0, 0.5}, {1, 0.5}});
  auto q = dist({{0, 0.25}, {1, 0.75}});
  EXPECT_DOUBLE_EQ(kl_divergence(p, p), 0.0);
  // 0.5 log2(2) + 0.5 log2(2/3)
  EXPECT_NEAR(kl_divergence(p, q), 0.5 + 0.5 * std::log2(2.0 / 3.0), 1e-14);
  EXPECT_NEAR(js_divergence(FiniteDistribution::point(0), FiniteDistribution::point(1)), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(kl_divergence(FiniteDistribution::point(0), FiniteDistribution::point(1))));
}

TEST(Divergence, PinskerInBits) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 5000; ++t) {
    auto p = random_dist(rng, 6, 0.0), q = random_dist(rng, 6, 0.0);
    const double tv = tv_distance(p, q);
    EXPECT_GE(kl_divergence(p, q) + 1e-12, 2.0 / std::log(2.0) * tv * tv);
  }
}

TEST(Divergence, JsIsSymmetricAndBounded) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 1000; ++t) {
    auto p = random_dist(rng, 6, 0.4), q = random_dist(rng, 6, 0.4);
    const double js = js_divergence(p, q);
    EXPECT_NEAR(js, js_divergence(q, p), 1e-12);
    EXPECT_GE(js, -1e-15);
    EXPECT_LE(js, 1.0 + 1e-12);
  }
}

TEST(Decompose, AlphaOneSpecialCase) {
  auto d0 = dist({{0, 0.2}, {1, 0.8}});
  auto d1 = dist({{1, 0.6}, {2, 0.4}});
  auto dec = decompose(d0, d1, 1.0);
  EXPECT_EQ(dec.delta, 0.0);
  EXPECT_EQ(dec.zeroPart, d0);
  EXPECT_EQ(dec.common, d1);
}

TEST(Decompose, DisjointInputs) {
  auto d0 = dist({{0, 0.2}, {1, 0.8}});
  auto d1 = dist({{2, 0.6}, {3, 0.4}});
  auto dec = decompose(d0, d1, 0.3);
  EXPECT_NEAR(dec.delta, 1.0, 1e-15);
  EXPECT_EQ(dec.zeroPart, d0);
  EXPECT_EQ(dec.onePart, d1);
}

TEST(Decompose, DegenerateEndsAreExact) {
  // Masses that do not sum to exactly 1 in binary.
  auto d0 = dist({{0, 0.1}, {1, 0.2}, {2, 0.7}});
  auto d1 = dist({{3, 0.1}, {4, 0.2}, {5, 0.7}});
  EXPECT_EQ(decompose(d0, d1, 0.4).delta, 1.0);
  EXPECT_EQ(decompose(d1, d1, 0.0).delta, 0.0);
}

TEST(Decompose, HandEvaluatedExample) {
  // min(d0, d1) = (1/4, 1/2), total 3/4, so delta = 1/4.
  auto dec = decompose(dist({{0, 0.5}, {1, 0.5}}), dist({{0, 0.25}, {1, 0.75}}), 0.0);
  EXPECT_NEAR(dec.delta, 0.25, 1e-15);
  EXPECT_NEAR(dec.common(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(dec.common(1), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(dec.zeroPart(0), 1.0, 1e-15);
  EXPECT_NEAR(dec.onePart(1), 1.0, 1e-15);
}

TEST(Decompose, ExactRationalExample) {
  using R = Rational;
  RationalDistribution d0(std::map<Atom, R>{{0, R(1, 2)}, {1, R(1, 2)}});
  RationalDistribution d1(std::map<Atom, R>{{0, R(1, 4)}, {1, R(3, 4)}});
  auto dec = decompose(d0, d1, R(0));
  EXPECT_EQ(dec.delta, R(1, 4));
  EXPECT_EQ(dec.common(0), R(1, 3));
  EXPECT_EQ(dec.common(1), R(2, 3));
}

TEST(Decompose, RejectsAlphaOutsideUnitInterval) {
  auto d = dist({{0, 1.0}});
  EXPECT_THROW(decompose(d, d, -0.1), InvalidArgument);
  EXPECT_THROW(decompose(d, d, 1.5), InvalidArgument);
}

TEST(Decompose, DeltaIsTvAtAlphaZero) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 2000; ++t) {
    auto d0 = random_dist(rng, 10, 0.3), d1 = random_dist(rng, 10, 0.3);
    EXPECT_NEAR(decompose(d0, d1, 0.0).delta, tv_distance(d0, d1), 1e-12);
  }
}

TEST(Decompose, DeltaMatchesOverlapDeficit) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 0.999);
  for (int t = 0; t < 2000; ++t) {
    auto d0 = random_dist(rng, 10, 0.3), d1 = random_dist(rng, 10, 0.3);
    const double a = u(rng);
    double overlap = 0.0;
    for (Atom x = 0; x < 10; ++x) overlap += std::min(d0(x) / (1.0 - a), d1(x));
    const double want = std::clamp(1.0 - overlap, 0.0, 1.0);
    EXPECT_NEAR(decompose(d0, d1, a).delta, want, 1e-12);
  }
}

TEST(GammaC, ClosedForm) {
  EXPECT_NEAR(gamma_c(0.5), 1.0 / (0.5 * std::log(2.0 * std::exp(1.0))), 1e-15);
}
