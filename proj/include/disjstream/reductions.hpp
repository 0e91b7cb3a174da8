#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "disjstream/disj_instance.hpp"
#include "disjstream/stream.hpp"

namespace disjstream {

// Streams built from a DISJ instance: a preloaded vector followed by one
// insertion-only block per player.
struct ReducedStream {
  std::size_t universe = 0;
  FrequencyVector initial;
  std::vector<UpdateStream> blocks;
  Label label = Label::kNo;
  std::optional<std::size_t> star;
  std::size_t n = 0, k = 0, l = 0;
  double p = 0.0;

  FrequencyVector final_vector(std::size_t passes = 1) const;
  // Preload as +1 updates, then the player blocks repeated `passes` times.
  UpdateStream flatten(std::size_t passes = 1) const;
  StreamHeader header() const;
};

struct ReductionParams {
  std::size_t k = 0;
  std::size_t l = 0;
};

// ceil that ignores floating noise just above an integer.
std::size_t ceil_tol(double x);

// k = ceil(2 eps (4n)^(1/p)), l = ceil(eps (4n)^(1/p)), for eps in (n^(-1/p), 1/2).
ReductionParams hh_reduction_params(std::size_t n, double p, double eps);
// f0 = (0^n, 1^n), then each player's row as +1 updates on [n].
ReducedStream to_hh_stream(const DisjInstance& inst, double p, double eps);

// k = ceil(2 n^zeta), l = ceil(n^zeta), for zeta in (1/p, 1].
ReductionParams powerlaw_params(std::size_t n, double p, double zeta);
// Padding value of coordinate i in [2, n+1]: ceil(2 n^zeta i^-zeta).
std::int64_t powerlaw_padding(std::size_t n, double zeta, std::size_t i);
ReducedStream to_powerlaw_stream(const DisjInstance& inst, double p, double zeta);
// sum_{i>=1} i^-m for m > 1, to within 1e-9.
double harmonic_zeta(double m);

// k = 2 ceil((2n)^(1/p)), l = k/2, so (k/2)^p >= 2n.
ReductionParams fp_params(std::size_t n, double p);
ReducedStream to_fp_stream(const DisjInstance& inst, double p);
double compute_fp(const FrequencyVector& f, double p);

bool is_lp_heavy(const FrequencyVector& f, std::size_t i, double p, double eps);
std::vector<std::size_t> lp_heavy_hitters(const FrequencyVector& f, double p, double eps);
bool is_lp_heavy(const Eigen::VectorXd& x, Eigen::Index i, double p, double eps);

struct PowerLawConstants {
  double c_lo = 0.5;
  double c_hi = 4.0;
  double additive = 1.0;
};

// Sorted magnitudes satisfy
//   c_lo f(1) r^-zeta - additive <= f(r) <= c_hi f(1) r^-zeta + additive.
bool is_power_law(const FrequencyVector& f, double zeta, const PowerLawConstants& c = {},
                  std::string* why = nullptr);

struct AdversaryResult {
  Eigen::VectorXd x1;
  Eigen::VectorXd x2;
  Eigen::Index istar = 0;
  double min_projection = 0.0;  // ||M^T M e_istar||^2
};

// Two nonnegative-or-signed inputs with equal sketches M x1 = M x2 where istar
// is a 1/4-heavy hitter of x1 but not of x2. Requires r/n <= 1 - 1/sqrt(2).
AdversaryResult linear_sketch_adversary(const Eigen::MatrixXd& M);

}  // namespace disjstream
