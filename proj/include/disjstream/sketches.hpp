#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace disjstream {

// Misra-Gries summary over an insertion-only stream with S counter slots.
// Every estimate satisfies x_i - P/(S+1) <= estimate(i) <= x_i; more precisely
// x_i - estimate(i) <= decrement_rounds().
class MisraGriesSummary {
 public:
  explicit MisraGriesSummary(std::size_t capacity);

  void update(std::uint64_t item);
  std::uint64_t estimate(std::uint64_t item) const;

  std::size_t capacity() const { return capacity_; }
  std::uint64_t processed() const { return processed_; }
  std::uint64_t decrement_rounds() const { return rounds_; }
  std::size_t size() const { return counters_.size(); }
  // (item, count) pairs sorted by item.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counters() const;

  nlohmann::json to_json() const;
  static MisraGriesSummary from_json(const nlohmann::json& j);

  friend bool operator==(const MisraGriesSummary& a, const MisraGriesSummary& b) {
    return a.capacity_ == b.capacity_ && a.processed_ == b.processed_ && a.rounds_ == b.rounds_ &&
           a.counters_ == b.counters_;
  }

 private:
  std::size_t capacity_;
  std::uint64_t processed_ = 0;
  std::uint64_t rounds_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> counters_;
};

// Reference CountSketch: depth rows of width signed counters, median estimate.
class CountSketch {
 public:
  CountSketch(std::size_t width, std::size_t depth, std::uint64_t seed);

  void update(std::uint64_t item, std::int64_t delta = 1);
  double estimate(std::uint64_t item) const;
  // Median over rows of the row's squared norm.
  double l2_squared_estimate() const;
  // Items of [0, universe) whose estimate is at least eps * sqrt(l2 estimate).
  std::vector<std::uint64_t> heavy_hitters(double eps, std::uint64_t universe) const;

  std::size_t width() const { return width_; }
  std::size_t depth() const { return depth_; }

 private:
  std::size_t bucket(std::size_t row, std::uint64_t item) const;
  int sign(std::size_t row, std::uint64_t item) const;

  std::size_t width_, depth_;
  std::vector<std::uint64_t> row_seeds_;
  std::vector<std::int64_t> table_;
};

}  // namespace disjstream
