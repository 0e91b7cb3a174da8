#include "disjstream/sparse_recovery.hpp"

#include <algorithm>

#include "disjstream/errors.hpp"

namespace disjstream {

namespace gf {

std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  a = reduce(a);
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

std::uint64_t inv(std::uint64_t a) {
  if (reduce(a) == 0) throw InvalidArgument("zero has no inverse");
  return pow(a, kModulus - 2);
}

std::uint64_t from_signed(std::int64_t v) {
  if (v >= 0) return reduce(static_cast<std::uint64_t>(v));
  const std::uint64_t m = reduce(static_cast<std::uint64_t>(-(v + 1)) + 1);
  return m == 0 ? 0 : kModulus - m;
}

std::int64_t to_signed(std::uint64_t v) {
  v = reduce(v);
  return v > kModulus / 2 ? -static_cast<std::int64_t>(kModulus - v) : static_cast<std::int64_t>(v);
}

}  // namespace gf

SyndromeSketch::SyndromeSketch(std::uint64_t universe, std::size_t sparsity, std::uint64_t generator)
    : universe_(universe), sparsity_(sparsity), generator_(gf::reduce(generator)),
      syndromes_(2 * sparsity, 0) {
  if (universe == 0) throw InvalidArgument("universe must be nonempty");
  if (sparsity == 0) throw InvalidArgument("sparsity must be positive");
  if (universe >= gf::kModulus - 1) throw InvalidArgument("universe too large for distinct points");
  if (generator_ == 0 || generator_ == 1) throw InvalidArgument("generator must differ from 0 and 1");
}

void SyndromeSketch::update(std::uint64_t index, std::int64_t delta) {
  const std::pair<std::uint64_t, std::int64_t> e{index, delta};
  apply_batch({&e, 1});
}

namespace {

// x mod q up to one extra multiple of q; input < 2^64, output < 2^61 + 8.
inline std::uint64_t fold(std::uint64_t x) { return (x & gf::kModulus) + (x >> 61); }

// a < 2^62, b < 2^61: returns a*b mod q up to one extra q.
inline std::uint64_t mul_lazy(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return fold((static_cast<std::uint64_t>(p) & gf::kModulus) + static_cast<std::uint64_t>(p >> 61));
}

}  // namespace

void SyndromeSketch::apply_batch(std::span<const std::pair<std::uint64_t, std::int64_t>> entries) {
  constexpr std::size_t kLanes = 8;
  const std::size_t len = syndromes_.size();
  std::uint64_t* s = syndromes_.data();
  for (std::size_t base = 0; base < entries.size(); base += kLanes) {
    std::uint64_t pw[kLanes] = {};
    std::uint64_t step[kLanes];
    for (std::size_t t = 0; t < kLanes; ++t) step[t] = 1;
    for (std::size_t t = 0; t < kLanes && base + t < entries.size(); ++t) {
      const auto& [idx, delta] = entries[base + t];
      if (idx >= universe_) throw InvalidArgument("sketch index out of range");
      pw[t] = gf::from_signed(delta);
      step[t] = gf::pow(generator_, idx);
      ++updates_;
    }
    // Independent multiply chains overlap their latencies; values stay below
    // 2^61 + 8 between full reductions.
    for (std::size_t j = 0; j < len; ++j) {
      std::uint64_t acc = 0;
      for (std::size_t t = 0; t < kLanes; ++t) acc += pw[t];
      s[j] = gf::reduce(s[j] + fold(acc));
      for (std::size_t t = 0; t < kLanes; ++t) pw[t] = mul_lazy(pw[t], step[t]);
    }
  }
}

void SyndromeSketch::merge(const SyndromeSketch& other) {
  if (other.universe_ != universe_ || other.sparsity_ != sparsity_ || other.generator_ != generator_)
    throw InvalidArgument("cannot merge sketches with different parameters");
  for (std::size_t j = 0; j < syndromes_.size(); ++j)
    syndromes_[j] = gf::add(syndromes_[j], other.syndromes_[j]);
  updates_ += other.updates_;
}

bool SyndromeSketch::is_zero() const {
  return std::all_of(syndromes_.begin(), syndromes_.end(), [](std::uint64_t v) { return v == 0; });
}

std::vector<std::uint64_t> berlekamp_massey(std::span<const std::uint64_t> seq) {
  std::vector<std::uint64_t> C{1}, B{1};
  std::size_t L = 0, m = 1;
  std::uint64_t b = 1;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    std::uint64_t d = seq[n];
    for (std::size_t i = 1; i <= L && i < C.size(); ++i) d = gf::add(d, gf::mul(C[i], seq[n - i]));
    if (d == 0) {
      ++m;
      continue;
    }
    const std::uint64_t coef = gf::mul(d, gf::inv(b));
    std::vector<std::uint64_t> T = C;
    if (C.size() < B.size() + m) C.resize(B.size() + m, 0);
    for (std::size_t i = 0; i < B.size(); ++i) C[i + m] = gf::sub(C[i + m], gf::mul(coef, B[i]));
    if (2 * L <= n) {
      L = n + 1 - L;
      B = std::move(T);
      b = d;
      m = 1;
    } else {
      ++m;
    }
  }
  C.resize(L + 1, 0);
  return C;
}

std::optional<SparseVector> SyndromeSketch::decode() const {
  if (is_zero()) return SparseVector{};
  const auto C = berlekamp_massey(syndromes_);
  const std::size_t L = C.size() - 1;
  if (L == 0 || L > sparsity_) return std::nullopt;

  // Locator P(x) = x^L + c_1 x^(L-1) + ... + c_L vanishes at the support points.
  std::vector<std::uint64_t> roots;
  std::vector<std::uint64_t> where;
  std::uint64_t a = 1;
  for (std::uint64_t i = 0; i < universe_; ++i, a = gf::mul(a, generator_)) {
    std::uint64_t v = 1;
    for (std::size_t t = 1; t <= L; ++t) v = gf::add(gf::mul(v, a), C[t]);
    if (v == 0) {
      roots.push_back(a);
      where.push_back(i);
      if (roots.size() > L) return std::nullopt;
    }
  }
  if (roots.size() != L) return std::nullopt;

  // v_k = (sum_j q_kj s_j) / Q_k(b_k) with Q_k = P / (x - b_k).
  SparseVector out;
  std::vector<std::uint64_t> q(L);
  for (std::size_t k = 0; k < L; ++k) {
    const std::uint64_t b = roots[k];
    // Synthetic division of P (descending coefficients 1, c_1, ..., c_L).
    std::uint64_t carry = 1;
    q[L - 1] = 1;
    for (std::size_t t = 1; t < L; ++t) {
      carry = gf::add(gf::mul(carry, b), C[t]);
      q[L - 1 - t] = carry;
    }
    std::uint64_t num = 0, den = 0, bp = 1;
    for (std::size_t j = 0; j < L; ++j) {
      num = gf::add(num, gf::mul(q[j], syndromes_[j]));
      den = gf::add(den, gf::mul(q[j], bp));
      bp = gf::mul(bp, b);
    }
    if (den == 0) return std::nullopt;
    const std::uint64_t val = gf::mul(num, gf::inv(den));
    if (val == 0) return std::nullopt;
    out.emplace_back(where[k], gf::to_signed(val));
  }

  // Re-encode and compare all 2S syndromes.
  SyndromeSketch check(universe_, sparsity_, generator_);
  check.apply_batch(out);
  if (check.syndromes_ != syndromes_) return std::nullopt;
  return out;
}

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t off) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[off + static_cast<std::size_t>(b)]) << (8 * b);
  return v;
}

}  // namespace

std::vector<std::uint8_t> SyndromeSketch::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(8 * (3 + syndromes_.size()));
  put_u64(out, gf::kModulus);
  put_u64(out, sparsity_);
  put_u64(out, generator_);
  for (auto s : syndromes_) put_u64(out, s);
  return out;
}

SyndromeSketch SyndromeSketch::deserialize(std::span<const std::uint8_t> bytes, std::uint64_t universe) {
  if (bytes.size() < 24 || bytes.size() % 8 != 0) throw InvalidArgument("truncated sketch bytes");
  if (get_u64(bytes, 0) != gf::kModulus) throw InvalidArgument("sketch uses a different field");
  const std::size_t S = static_cast<std::size_t>(get_u64(bytes, 8));
  if (bytes.size() != 8 * (3 + 2 * S)) throw InvalidArgument("sketch length does not match S");
  SyndromeSketch sk(universe, S, get_u64(bytes, 16));
  for (std::size_t j = 0; j < 2 * S; ++j) {
    const std::uint64_t v = get_u64(bytes, 24 + 8 * j);
    if (v >= gf::kModulus) throw InvalidArgument("syndrome is not a canonical field element");
    sk.syndromes_[j] = v;
  }
  return sk;
}

}  // namespace disjstream
