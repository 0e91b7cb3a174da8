#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace disjstream {

// Arithmetic modulo the Mersenne prime 2^61 - 1.
namespace gf {

inline constexpr std::uint64_t kModulus = (std::uint64_t{1} << 61) - 1;
// Primitive root modulo kModulus.
inline constexpr std::uint64_t kGenerator = 37;

inline std::uint64_t reduce(std::uint64_t x) {
  x = (x & kModulus) + (x >> 61);
  return x >= kModulus ? x - kModulus : x;
}
inline std::uint64_t add(std::uint64_t a, std::uint64_t b) { return reduce(a + b); }
inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kModulus - b; }
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  const std::uint64_t lo = static_cast<std::uint64_t>(p) & kModulus;
  const std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  return reduce(lo + hi);
}
std::uint64_t pow(std::uint64_t a, std::uint64_t e);
std::uint64_t inv(std::uint64_t a);
std::uint64_t from_signed(std::int64_t v);
// Representative in (-q/2, q/2).
std::int64_t to_signed(std::uint64_t v);

}  // namespace gf

using SparseVector = std::vector<std::pair<std::uint64_t, std::int64_t>>;

// Power sums s_j = sum_i x_i a_i^j, j < 2S, with a_i = g^i over GF(2^61-1).
// Decodes every vector with at most S nonzeros exactly.
class SyndromeSketch {
 public:
  SyndromeSketch(std::uint64_t universe, std::size_t sparsity,
                 std::uint64_t generator = gf::kGenerator);

  void update(std::uint64_t index, std::int64_t delta);
  // Same result as updating entry by entry; interleaves power chains.
  void apply_batch(std::span<const std::pair<std::uint64_t, std::int64_t>> entries);
  void merge(const SyndromeSketch& other);

  // nullopt when no vector with at most S nonzeros explains the syndromes.
  std::optional<SparseVector> decode() const;

  bool is_zero() const;
  std::uint64_t universe() const { return universe_; }
  std::size_t sparsity() const { return sparsity_; }
  std::uint64_t generator() const { return generator_; }
  std::uint64_t update_count() const { return updates_; }
  const std::vector<std::uint64_t>& syndromes() const { return syndromes_; }

  // q, S, g, then the 2S syndromes, each a little-endian u64.
  std::vector<std::uint8_t> serialize() const;
  static SyndromeSketch deserialize(std::span<const std::uint8_t> bytes, std::uint64_t universe);

  friend bool operator==(const SyndromeSketch& a, const SyndromeSketch& b) {
    return a.universe_ == b.universe_ && a.sparsity_ == b.sparsity_ &&
           a.generator_ == b.generator_ && a.syndromes_ == b.syndromes_;
  }

 private:
  std::uint64_t universe_;
  std::size_t sparsity_;
  std::uint64_t generator_;
  std::uint64_t updates_ = 0;
  std::vector<std::uint64_t> syndromes_;
};

// Connection polynomial (c_0 = 1, ..., c_L) of the shortest LFSR generating
// the sequence.
std::vector<std::uint64_t> berlekamp_massey(std::span<const std::uint64_t> seq);

}  // namespace disjstream
