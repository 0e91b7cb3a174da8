#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "disjstream/sketches.hpp"
#include "disjstream/sparse_recovery.hpp"

namespace disjstream {

struct LinfEstimate {
  std::map<std::uint64_t, std::int64_t> values;  // nonzero entries of z
  double error_bound = 0.0;                      // 2L/S
  bool from_sparse = false;                      // z came from the decoded sketch
  std::int64_t value(std::uint64_t i) const {
    auto it = values.find(i);
    return it == values.end() ? 0 : it->second;
  }
};

// Deterministic l2 heavy hitters for +-1 streams of length at most L: two
// Misra-Gries summaries (insertions, deletions) and an S-sparse recovery
// sketch.
class BoundedTurnstileHH {
 public:
  // Words of state per (L/eps)^(2/3), for either factory below.
  static constexpr double kSpaceConstant = 26.0;
  // Pending updates are coalesced per index and applied to the sketch once
  // kBufferFactor * S distinct indices are waiting.
  static constexpr std::size_t kBufferFactor = 2;

  BoundedTurnstileHH(std::uint64_t universe, double eps, std::uint64_t length_bound,
                     std::size_t sparsity);

  // ceil((L/eps)^(2/3)).
  static std::size_t sparsity_for(std::uint64_t length_bound, double eps);
  // Strict-turnstile configuration: sparsity_for(L, eps/4).
  static BoundedTurnstileHH strict(std::uint64_t universe, double eps, std::uint64_t length_bound);
  // l_inf/l_2 configuration: S = ceil(2 (L/eps)^(2/3)).
  static BoundedTurnstileHH linf(std::uint64_t universe, double eps, std::uint64_t length_bound);

  void update(std::uint64_t index, int sign);

  // Requires x >= 0 throughout. Returns every eps-heavy hitter; see README for
  // the precise output rule.
  std::vector<std::uint64_t> query_strict() const;
  LinfEstimate query_linf() const;

  // x_hat_i = MG+(i) - MG-(i).
  std::int64_t estimate(std::uint64_t i) const;

  std::uint64_t universe() const { return universe_; }
  double eps() const { return eps_; }
  std::uint64_t length_bound() const { return length_bound_; }
  std::size_t sparsity() const { return sparsity_; }
  std::uint64_t positives() const { return pos_count_; }
  std::uint64_t negatives() const { return neg_count_; }
  const MisraGriesSummary& mg_pos() const { return mg_pos_; }
  const MisraGriesSummary& mg_neg() const { return mg_neg_; }
  const SyndromeSketch& sketch() const;

  // Counter slots + syndromes + update buffer + scalars, in 64-bit words.
  std::size_t word_count() const;

  nlohmann::json to_json() const;
  static BoundedTurnstileHH from_json(const nlohmann::json& j);

 private:
  void flush() const;

  std::uint64_t universe_;
  double eps_;
  std::uint64_t length_bound_;
  std::size_t sparsity_;
  std::uint64_t pos_count_ = 0, neg_count_ = 0;
  MisraGriesSummary mg_pos_, mg_neg_;
  // Linear sketch plus a bounded buffer of coalesced pending updates.
  mutable SyndromeSketch sketch_;
  mutable std::unordered_map<std::uint64_t, std::int64_t> pending_;
};

}  // namespace disjstream
