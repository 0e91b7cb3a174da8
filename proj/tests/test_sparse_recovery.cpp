#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "disjstream/errors.hpp"
#include "disjstream/sparse_recovery.hpp"

using namespace disjstream;

namespace {

// Power sums the slow way, with a fresh exponentiation for every term.
std::vector<std::uint64_t> naive_syndromes(const std::map<std::uint64_t, std::int64_t>& x, std::size_t S) {
  std::vector<std::uint64_t> s(2 * S, 0);
  for (const auto& [i, v] : x)
    for (std::size_t j = 0; j < 2 * S; ++j)
      s[j] = gf::add(s[j], gf::mul(gf::from_signed(v), gf::pow(gf::pow(gf::kGenerator, i), j)));
  return s;
}

SparseVector sorted(const std::map<std::uint64_t, std::int64_t>& x) {
  SparseVector out;
  for (const auto& [i, v] : x)
    if (v != 0) out.emplace_back(i, v);
  return out;
}

std::map<std::uint64_t, std::int64_t> random_sparse(std::mt19937_64& rng, std::uint64_t n, std::size_t nnz) {
  std::map<std::uint64_t, std::int64_t> x;
  while (x.size() < nnz) {
    std::int64_t v = static_cast<std::int64_t>(rng() % 2001) - 1000;
    if (v == 0) v = 1;
    x[rng() % n] = v;
  }
  return x;
}

}  // namespace

TEST(Field, Arithmetic) {
  EXPECT_EQ(gf::reduce(gf::kModulus), 0u);
  EXPECT_EQ(gf::mul(gf::kModulus - 1, gf::kModulus - 1), 1u);
  EXPECT_EQ(gf::to_signed(gf::from_signed(-5)), -5);
  EXPECT_EQ(gf::mul(gf::inv(12345), 12345), 1u);
  EXPECT_EQ(gf::pow(gf::kGenerator, gf::kModulus - 1), 1u);
  EXPECT_THROW(gf::inv(0), InvalidArgument);
}

TEST(Syndrome, MatchesNaivePowerSums) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto x = random_sparse(rng, 500, 1 + rng() % 6);
    SyndromeSketch sk(500, 5);
    for (const auto& [i, v] : x) sk.update(i, v);
    EXPECT_EQ(sk.syndromes(), naive_syndromes(x, 5));
  }
}

TEST(Syndrome, BatchEqualsSequential) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    const std::size_t S = 1 + rng() % 40;
    SyndromeSketch a(4096, S), b(4096, S);
    std::vector<std::pair<std::uint64_t, std::int64_t>> batch;
    for (std::size_t e = 0; e < 1 + rng() % 50; ++e)
      batch.emplace_back(rng() % 4096, static_cast<std::int64_t>(rng() % 7) - 3);
    for (const auto& [i, v] : batch) a.update(i, v);
    b.apply_batch(batch);
    EXPECT_EQ(a, b);
  }
}

TEST(Syndrome, DecodesTwoSparseExample) {
  SyndromeSketch sk(16, 2);
  sk.update(3, 5);
  sk.update(7, -2);
  const auto d = sk.decode();
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(*d, (SparseVector{{3, 5}, {7, -2}}));
}

TEST(Syndrome, ZeroVectorDecodesEmpty) {
  SyndromeSketch sk(100, 4);
  sk.update(9, 3);
  sk.update(9, -3);
  EXPECT_TRUE(sk.is_zero());
  ASSERT_TRUE(sk.decode().has_value());
  EXPECT_TRUE(sk.decode()->empty());
}

TEST(Syndrome, RandomExactRecovery) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const std::uint64_t n = 1 + rng() % 4096;
    const std::size_t S = 1 + rng() % 64;
    const auto x = random_sparse(rng, n, std::min<std::uint64_t>(n, 1 + rng() % S));
    SyndromeSketch sk(n, S);
    for (const auto& [i, v] : x) sk.update(i, v);
    const auto d = sk.decode();
    ASSERT_TRUE(d.has_value()) << "n=" << n << " S=" << S;
    EXPECT_EQ(*d, sorted(x));
  }
}

TEST(Syndrome, OverSparseIsNeverDecodedWrongly) {
  std::mt19937_64 rng(4);
  int rejected = 0;
  for (int t = 0; t < 500; ++t) {
    const std::uint64_t n = 200 + rng() % 3000;
    const std::size_t S = 1 + rng() % 16;
    const auto x = random_sparse(rng, n, S + 1 + rng() % (2 * S));
    SyndromeSketch sk(n, S);
    for (const auto& [i, v] : x) sk.update(i, v);
    const auto d = sk.decode();
    if (!d) {
      ++rejected;
      continue;
    }
    // Any answer must be the true vector, which has more than S entries.
    EXPECT_EQ(*d, sorted(x));
  }
  EXPECT_EQ(rejected, 500);
}

TEST(Syndrome, MergeIsAddition) {
  SyndromeSketch a(1000, 6), b(1000, 6), c(1000, 6);
  a.update(10, 4);
  b.update(10, -1);
  b.update(20, 2);
  c.update(10, 3);
  c.update(20, 2);
  a.merge(b);
  EXPECT_EQ(a, c);
  EXPECT_THROW(a.merge(SyndromeSketch(1000, 5)), InvalidArgument);
}

TEST(Syndrome, SerializeRoundTrip) {
  SyndromeSketch sk(777, 3);
  sk.update(5, 1);
  sk.update(600, -9);
  const auto bytes = sk.serialize();
  EXPECT_EQ(bytes.size(), 8u * (3 + 6));
  EXPECT_EQ(SyndromeSketch::deserialize(bytes, 777), sk);
  auto cut = bytes;
  cut.pop_back();
  EXPECT_THROW(SyndromeSketch::deserialize(cut, 777), InvalidArgument);
}

TEST(Syndrome, RejectsBadArguments) {
  EXPECT_THROW(SyndromeSketch(0, 1), InvalidArgument);
  EXPECT_THROW(SyndromeSketch(10, 0), InvalidArgument);
  SyndromeSketch sk(10, 1);
  EXPECT_THROW(sk.update(10, 1), InvalidArgument);
}

TEST(BerlekampMassey, GeometricAndFibonacci) {
  // a_j = 3^j satisfies a_j = 3 a_{j-1}: connection polynomial 1 - 3z.
  std::vector<std::uint64_t> geo;
  for (int j = 0; j < 8; ++j) geo.push_back(gf::pow(3, j));
  EXPECT_EQ(berlekamp_massey(geo), (std::vector<std::uint64_t>{1, gf::sub(0, 3)}));
  std::vector<std::uint64_t> fib{0, 1};
  for (int j = 2; j < 12; ++j) fib.push_back(fib[j - 1] + fib[j - 2]);
  const auto c = berlekamp_massey(fib);
  const std::uint64_t m1 = gf::sub(0, 1);
  EXPECT_EQ(c, (std::vector<std::uint64_t>{1, m1, m1}));
}
