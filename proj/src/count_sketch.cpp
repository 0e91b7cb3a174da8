#include <algorithm>
#include <cmath>

#include "disjstream/errors.hpp"
#include "disjstream/rng.hpp"
#include "disjstream/sketches.hpp"

namespace disjstream {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

CountSketch::CountSketch(std::size_t width, std::size_t depth, std::uint64_t seed)
    : width_(width), depth_(depth), table_(width * depth, 0) {
  if (width == 0 || depth == 0) throw InvalidArgument("CountSketch needs positive width and depth");
  for (std::size_t r = 0; r < depth; ++r) row_seeds_.push_back(mix_key(seed, r));
}

std::size_t CountSketch::bucket(std::size_t row, std::uint64_t item) const {
  return static_cast<std::size_t>(mix_key(row_seeds_[row], item) % width_);
}

int CountSketch::sign(std::size_t row, std::uint64_t item) const {
  return (mix_key(row_seeds_[row] ^ 0x5bd1e995ULL, item) & 1) ? 1 : -1;
}

void CountSketch::update(std::uint64_t item, std::int64_t delta) {
  for (std::size_t r = 0; r < depth_; ++r)
    table_[r * width_ + bucket(r, item)] += sign(r, item) * delta;
}

double CountSketch::estimate(std::uint64_t item) const {
  std::vector<double> v(depth_);
  for (std::size_t r = 0; r < depth_; ++r)
    v[r] = static_cast<double>(sign(r, item) * table_[r * width_ + bucket(r, item)]);
  return median(std::move(v));
}

double CountSketch::l2_squared_estimate() const {
  std::vector<double> v(depth_, 0.0);
  for (std::size_t r = 0; r < depth_; ++r)
    for (std::size_t b = 0; b < width_; ++b) {
      const double c = static_cast<double>(table_[r * width_ + b]);
      v[r] += c * c;
    }
  return median(std::move(v));
}

std::vector<std::uint64_t> CountSketch::heavy_hitters(double eps, std::uint64_t universe) const {
  const double thr = eps * std::sqrt(l2_squared_estimate());
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < universe; ++i) {
    const double e = estimate(i);
    if (e != 0.0 && std::abs(e) >= thr) out.push_back(i);
  }
  return out;
}

}  // namespace disjstream
