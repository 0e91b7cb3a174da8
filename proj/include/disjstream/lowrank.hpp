#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "disjstream/disj_instance.hpp"
#include "disjstream/stream.hpp"

namespace disjstream {

// sqrt(d) players each hold a set of ceil(sqrt(d)/2) coordinates and stream
// one standard-basis row e_i per element, player by player.
struct RowStreamInstance {
  std::size_t d = 0;
  std::vector<std::vector<std::size_t>> sets;
  Label label = Label::kNo;
  std::optional<std::size_t> star;

  std::size_t players() const { return sets.size(); }
  // Sets [0, midpoint_sets()) form the first half of the stream.
  std::size_t midpoint_sets() const { return sets.size() / 2; }
  std::vector<std::size_t> rows() const;
  std::vector<std::size_t> first_half_rows() const;
  std::vector<std::size_t> second_half_rows() const;
  UpdateStream to_stream() const;

  nlohmann::json to_json() const;
  static RowStreamInstance from_json(const nlohmann::json& j);
};

// c_i = number of rows equal to e_i; A^T A = diag(c).
struct CountsProfile {
  std::vector<std::uint64_t> counts;
  static CountsProfile from_rows(std::size_t d, const std::vector<std::size_t>& rows);
  std::uint64_t frobenius_sq() const;
};

// Number of sets holding the star in a YES instance: ceil(2 sqrt(d)/3).
std::size_t lowrank_star_multiplicity(std::size_t d);

RowStreamInstance gen_lowrank_instance(std::size_t d, Label label, std::uint64_t seed);

// ||A - A v v^T||_F^2 = sum c - sum c v^2 for unit v.
double residual_rank1(const CountsProfile& counts, const Eigen::VectorXd& v);

inline constexpr double kDefaultTau = 0.05;
inline constexpr std::size_t kMaxHeavyCoordinates = 20;

// T = {j : v_j^2 >= tau}; YES iff exactly one element of T occurs in the
// second half.
Label identify_star(const Eigen::VectorXd& v, double tau, const std::vector<std::size_t>& second_half_rows);

// Top eigenvector of A^T A from an exact symmetric eigensolver.
Eigen::VectorXd top_singular_vector(const CountsProfile& counts);

// Lower bound on v_star^2 implied by residual <= C * opt when the star has
// count c_star, the Frobenius mass is F, and every other count is at most 1.
double mass_threshold(double C, double c_star, double F);

// Largest C whose mass threshold is still >= target at the guaranteed
// midpoint counts for every d in dims.
double approximation_constant(const std::vector<std::size_t>& dims = {64, 256}, double target = 0.1);

}  // namespace disjstream
