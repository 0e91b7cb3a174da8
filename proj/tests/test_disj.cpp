#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "disjstream/disj_instance.hpp"
#include "disjstream/disj_protocols.hpp"
#include "disjstream/errors.hpp"

using namespace disjstream;

namespace {

// owner[i] = -1 for an empty column, else the single holder.
DisjInstance from_owners(std::size_t k, std::size_t l, const std::vector<int>& owner) {
  DisjInstance inst(owner.size(), k, l);
  for (std::size_t i = 0; i < owner.size(); ++i)
    if (owner[i] >= 0) inst.set_bit(static_cast<std::size_t>(owner[i]), i, true);
  return inst;
}

std::vector<PlayerInput> inputs_of(const DisjInstance& inst) {
  const auto m = inst.row_masks();
  return {m.begin(), m.end()};
}

// Visits every instance satisfying the promise (n small).
template <class F>
void for_each_promise_instance(std::size_t n, std::size_t k, std::size_t l, F&& visit) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k + 1;
  std::vector<int> owner(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (std::size_t i = 0; i < n; ++i, c /= k + 1) owner[i] = static_cast<int>(c % (k + 1)) - 1;
    auto no = from_owners(k, l, owner);
    no.label = Label::kNo;
    visit(no);
    if (l < 2) continue;
    for (std::size_t star = 0; star < n; ++star)
      for (std::uint64_t s = 0; s < (1u << k); ++s) {
        if (static_cast<std::size_t>(std::popcount(s)) != l) continue;
        auto yes = no;
        for (std::size_t j = 0; j < k; ++j) yes.set_bit(j, star, (s >> j) & 1);
        yes.label = Label::kYes;
        yes.star = star;
        visit(yes);
      }
  }
}

}  // namespace

TEST(Instance, LabelStrings) {
  EXPECT_EQ(label_from_string(to_string(Label::kYes)), Label::kYes);
  EXPECT_EQ(label_from_string(to_string(Label::kNo)), Label::kNo);
  EXPECT_THROW(label_from_string("maybe"), InvalidArgument);
}

TEST(Instance, VerifyPromiseCases) {
  DisjInstance inst(4, 3, 2);
  EXPECT_EQ(verify_promise(inst).label, Label::kNo);
  inst.set_bit(0, 1, true);
  inst.set_bit(2, 3, true);
  EXPECT_EQ(verify_promise(inst).label, Label::kNo);
  inst.set_bit(1, 1, true);
  const auto yes = verify_promise(inst);
  EXPECT_EQ(yes.label, Label::kYes);
  EXPECT_EQ(yes.star, 1u);
  // A second heavy column breaks the promise.
  inst.set_bit(0, 3, true);
  const auto bad = verify_promise(inst);
  EXPECT_FALSE(bad.ok());
  EXPECT_EQ(bad.violating_columns, (std::vector<std::size_t>{1, 3}));
  // A single column of the wrong weight does too.
  DisjInstance three(3, 3, 2);
  for (std::size_t j = 0; j < 3; ++j) three.set_bit(j, 0, true);
  EXPECT_FALSE(verify_promise(three).ok());
  EXPECT_EQ(verify_promise(three).violating_columns, (std::vector<std::size_t>{0}));
}

TEST(Instance, RejectsBadParameters) {
  EXPECT_THROW(sample_eta(0, 3, 2, 0, 1), InvalidArgument);
  EXPECT_THROW(sample_eta(5, 3, 4, 0, 1), InvalidArgument);
  EXPECT_THROW(sample_eta(5, 3, 2, 2, 1), InvalidArgument);
  EXPECT_THROW(sample_eta(5, 3, 1, 1, 1), InvalidArgument);
  EXPECT_THROW(adversarial_yes(5, 3, 1, 1), InvalidArgument);
  EXPECT_THROW(default_l(4, 0.0), InvalidArgument);
}

TEST(Instance, DefaultMultiplicity) {
  EXPECT_EQ(default_l(16), 8u);
  EXPECT_EQ(default_l(5), 3u);
  EXPECT_EQ(default_l(10, 0.3), 3u);
}

TEST(SampleEta, NoInstanceHasUnitColumns) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = sample_eta(20, 5, 3, 0, seed);
    const auto r = verify_promise(s.instance);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(*r.label, Label::kNo);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        if (s.instance.bit(j, i)) EXPECT_EQ(s.owners[i], j);
  }
}

TEST(SampleEta, FullColumnWhenLEqualsK) {
  const auto s = sample_eta(10, 4, 4, 1, 3);
  EXPECT_EQ(s.instance.column_weight(s.special), 4u);
  EXPECT_EQ(s.owner_set, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(verify_promise(s.instance).star, s.special);
}

TEST(SampleEta, BitMarginalIsOneOverTwoK) {
  const std::size_t n = 10, k = 4;
  const int trials = 10000;
  std::size_t ones = 0;
  for (int t = 0; t < trials; ++t) {
    const auto s = sample_eta(n, k, 2, 0, static_cast<std::uint64_t>(t));
    for (std::size_t j = 0; j < k; ++j) ones += s.instance.bit(j, 0);
  }
  // 1e5 Bernoulli(1/8) samples, though not independent across players.
  const double draws = static_cast<double>(trials) * k;
  const double p = 1.0 / (2.0 * k);
  EXPECT_NEAR(ones / draws, p, 3.0 * std::sqrt(p * (1 - p) * k / draws));
}

TEST(Adversarial, DenseInstancesKeepPromise) {
  const auto no = adversarial_no(8, 4, 2, 1);
  EXPECT_EQ(verify_promise(no).label, Label::kNo);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(no.column_weight(i), 1u);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(no.row_size(j), 2u);
  const auto yes = adversarial_yes(8, 4, 2, 1);
  const auto r = verify_promise(yes);
  EXPECT_EQ(r.label, Label::kYes);
  EXPECT_EQ(r.star, yes.star);
  for (std::size_t i = 0; i < 8; ++i)
    if (i != *yes.star) EXPECT_EQ(yes.column_weight(i), 1u);
}

TEST(Adversarial, RandomGeneratorsAlwaysSatisfyPromise) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 1 + rng() % 40, k = 2 + rng() % 10, l = 2 + rng() % (k - 1);
    const int z = static_cast<int>(rng() % 2);
    const std::uint64_t seed = rng();
    DisjInstance inst;
    switch (t % 3) {
      case 0: inst = sample_eta(n, k, l, z, seed).instance; break;
      case 1: inst = adversarial_no(n, k, l, seed); break;
      default: inst = adversarial_yes(n, k, l, seed); break;
    }
    const auto r = verify_promise(inst);
    ASSERT_TRUE(r.ok()) << r.reason;
    EXPECT_EQ(*r.label, inst.label);
    if (inst.label == Label::kYes) EXPECT_EQ(r.star, inst.star);
  }
}

TEST(Instance, JsonRoundTrip) {
  const auto inst = adversarial_yes(12, 5, 3, 9);
  EXPECT_EQ(DisjInstance::from_json(inst.to_json()), inst);
}

TEST(Combinations, BinomialValues) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(64, 32), 1832624140942590534ull);
  EXPECT_EQ(binomial(3, 5), 0u);
}

TEST(Combinations, RankIsABijection) {
  const std::uint64_t universe = 0b1011011101;
  const int u = std::popcount(universe);
  for (int size = 0; size <= u; ++size) {
    std::set<std::uint64_t> ranks;
    for (std::uint64_t sub = universe;; sub = (sub - 1) & universe) {
      if (std::popcount(sub) == size) {
        const auto r = combination_rank(universe, sub);
        EXPECT_LT(r, binomial(u, size));
        EXPECT_TRUE(ranks.insert(r).second);
        EXPECT_EQ(combination_unrank(universe, size, r), sub);
      }
      if (sub == 0) break;
    }
    EXPECT_EQ(ranks.size(), binomial(u, size));
  }
}

TEST(Deterministic, ExhaustiveSmallInstances) {
  for (std::size_t k = 2; k <= 3; ++k)
    for (std::size_t n = 1; n <= 4; ++n)
      for (std::size_t l = 1; l <= k; ++l) {
        const auto spec = deterministic_disj_protocol(n, k);
        for_each_promise_instance(n, k, l, [&](const DisjInstance& inst) {
          const auto t = run_protocol(spec, inputs_of(inst), 0);
          ASSERT_TRUE(t.output.has_value());
          EXPECT_EQ(*t.output, inst.label == Label::kYes) << inst.to_json().dump();
        });
      }
}

TEST(Deterministic, EncodingsAgree) {
  for (auto enc : {PublishEncoding::kSubset, PublishEncoding::kSizeCombination, PublishEncoding::kAdaptive}) {
    const auto spec = deterministic_disj_protocol(6, 3, enc);
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto yes = adversarial_yes(6, 3, 2, s);
      const auto no = adversarial_no(6, 3, 2, s);
      EXPECT_TRUE(*run_protocol(spec, inputs_of(yes), s).output) << to_string(enc);
      EXPECT_FALSE(*run_protocol(spec, inputs_of(no), s).output) << to_string(enc);
    }
  }
  EXPECT_EQ(publish_encoding_from_string("size-combination"), PublishEncoding::kSizeCombination);
  EXPECT_THROW(publish_encoding_from_string("gzip"), InvalidArgument);
}

TEST(EpsilonPublish, EndpointsOfEps) {
  const auto inst = adversarial_yes(8, 4, 3, 2);
  const auto in = inputs_of(inst);
  EXPECT_DOUBLE_EQ(output_probability(epsilon_publish_protocol(8, 4, 3, 0.0), in), 0.0);
  EXPECT_DOUBLE_EQ(output_probability(epsilon_publish_protocol(8, 4, 3, 1.0), in), 1.0);
  // eps = 1 is the deterministic protocol, transcript for transcript.
  const auto a = run_protocol(epsilon_publish_protocol(8, 4, 3, 1.0), in, 4);
  const auto b = run_protocol(deterministic_disj_protocol(8, 4), in, 4);
  EXPECT_EQ(a.bit_cost(), b.bit_cost());
  EXPECT_EQ(a.output, b.output);
}

TEST(EpsilonPublish, NeverSaysYesOnNo) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto inst = sample_eta(7, 4, 2, 0, s).instance;
    const double eps = 0.1 + 0.02 * static_cast<double>(s);
    EXPECT_EQ(output_probability(epsilon_publish_protocol(7, 4, 2, eps), inputs_of(inst)), 0.0);
  }
}

TEST(EpsilonPublish, FailureProbabilityMatchesEnumeration) {
  for (std::size_t l : {2u, 3u, 4u})
    for (double eps : {0.2, 0.5, 0.8}) {
      const double closed = epsilon_publish_failure_probability(l, eps);
      EXPECT_NEAR(closed, std::pow(1 - eps, l) + l * eps * std::pow(1 - eps, l - 1), 1e-15);
      for (std::uint64_t s = 0; s < 5; ++s) {
        const auto inst = adversarial_yes(6, 4, l, s);
        const double yes = output_probability(epsilon_publish_protocol(6, 4, l, eps), inputs_of(inst));
        EXPECT_NEAR(1.0 - yes, closed, 1e-12) << "l=" << l << " eps=" << eps;
      }
    }
}

TEST(EpsilonPublish, RejectsBadEps) {
  EXPECT_THROW(epsilon_publish_protocol(4, 2, 2, 1.5), InvalidArgument);
  EXPECT_THROW(epsilon_publish_failure_probability(2, -0.1), InvalidArgument);
}

TEST(Pigeonhole, PromiseInstances) {
  const std::size_t n = 6, k = 3;
  const auto spec = pigeonhole_promise_protocol(n, k);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 300; ++t) {
    // Pairwise disjoint sets.
    std::vector<int> owner(n);
    for (auto& o : owner) o = static_cast<int>(rng() % (k + 1)) - 1;
    auto inst = from_owners(k, k, owner);
    EXPECT_FALSE(*run_protocol(spec, inputs_of(inst), rng()).output);
    // Add an element common to all.
    const std::size_t c = rng() % n;
    for (std::size_t j = 0; j < k; ++j) inst.set_bit(j, c, true);
    EXPECT_TRUE(*run_protocol(spec, inputs_of(inst), rng()).output);
  }
}
