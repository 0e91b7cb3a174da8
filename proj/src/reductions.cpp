#include "disjstream/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "disjstream/errors.hpp"

namespace disjstream {

FrequencyVector ReducedStream::final_vector(std::size_t passes) const {
  FrequencyVector f = initial;
  for (std::size_t r = 0; r < passes; ++r)
    for (const auto& block : blocks)
      for (const auto& u : block) f[u.index] += u.sign;
  return f;
}

UpdateStream ReducedStream::flatten(std::size_t passes) const {
  UpdateStream out;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    if (initial[i] < 0) throw InvalidArgument("negative preload cannot be expressed as insertions");
    for (std::int64_t c = 0; c < initial[i]; ++c)
      out.push_back({static_cast<std::uint32_t>(i), 1});
  }
  for (std::size_t r = 0; r < passes; ++r)
    for (const auto& block : blocks) out.insert(out.end(), block.begin(), block.end());
  return out;
}

StreamHeader ReducedStream::header() const { return {universe, k, l, p, label}; }

std::size_t ceil_tol(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("parameter must be finite and >= 0");
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

namespace {

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("p must be >= 1");
}

ReducedStream build(const DisjInstance& inst, std::size_t universe, double p) {
  ReducedStream s;
  s.universe = universe;
  s.initial.assign(universe, 0);
  s.label = inst.label;
  s.star = inst.star;
  s.n = inst.n();
  s.k = inst.k();
  s.l = inst.l();
  s.p = p;
  for (std::size_t j = 0; j < inst.k(); ++j) {
    UpdateStream block;
    for (std::size_t i : inst.row(j)) block.push_back({static_cast<std::uint32_t>(i), 1});
    s.blocks.push_back(std::move(block));
  }
  return s;
}

void check_shape(const DisjInstance& inst, const ReductionParams& want) {
  if (inst.k() != want.k || inst.l() != want.l)
    throw InvalidArgument("instance must have k = " + std::to_string(want.k) + " and l = " +
                          std::to_string(want.l) + " for these parameters (got k = " +
                          std::to_string(inst.k()) + ", l = " + std::to_string(inst.l()) + ")");
}

}  // namespace

ReductionParams hh_reduction_params(std::size_t n, double p, double eps) {
  check_p(p);
  if (n == 0) throw InvalidArgument("n must be positive");
  const double lo = std::pow(static_cast<double>(n), -1.0 / p);
  if (!(eps > lo && eps < 0.5))
    throw InvalidArgument("eps must lie in (n^(-1/p), 1/2) = (" + std::to_string(lo) + ", 0.5)");
  const double base = eps * std::pow(4.0 * static_cast<double>(n), 1.0 / p);
  ReductionParams r{ceil_tol(2.0 * base), ceil_tol(base)};
  if (r.l < 2) throw InvalidArgument("rounded l = eps (4n)^(1/p) is below 2");
  return r;
}

ReducedStream to_hh_stream(const DisjInstance& inst, double p, double eps) {
  check_shape(inst, hh_reduction_params(inst.n(), p, eps));
  ReducedStream s = build(inst, 2 * inst.n(), p);
  for (std::size_t i = inst.n(); i < 2 * inst.n(); ++i) s.initial[i] = 1;
  return s;
}

ReductionParams powerlaw_params(std::size_t n, double p, double zeta) {
  check_p(p);
  if (n == 0) throw InvalidArgument("n must be positive");
  if (!(zeta > 1.0 / p && zeta <= 1.0))
    throw InvalidArgument("zeta must lie in (1/p, 1]; otherwise H_{p zeta} diverges");
  const double nz = std::pow(static_cast<double>(n), zeta);
  ReductionParams r{ceil_tol(2.0 * nz), ceil_tol(nz)};
  if (r.l < 2) throw InvalidArgument("rounded l = n^zeta is below 2");
  return r;
}

std::int64_t powerlaw_padding(std::size_t n, double zeta, std::size_t i) {
  if (i < 2 || i > n + 1) throw InvalidArgument("padding index must lie in [2, n+1]");
  const double v = 2.0 * std::pow(static_cast<double>(n), zeta) * std::pow(static_cast<double>(i), -zeta);
  return static_cast<std::int64_t>(ceil_tol(v));
}

ReducedStream to_powerlaw_stream(const DisjInstance& inst, double p, double zeta) {
  check_shape(inst, powerlaw_params(inst.n(), p, zeta));
  const std::size_t n = inst.n();
  ReducedStream s = build(inst, 2 * n, p);
  for (std::size_t i = 2; i <= n + 1; ++i) s.initial[n + i - 2] = powerlaw_padding(n, zeta, i);
  return s;
}

double harmonic_zeta(double m) {
  if (!(m > 1.0)) throw InvalidArgument("harmonic_zeta needs m > 1");
  // Direct summation, then the Euler-Maclaurin tail once the plain integral
  // tail bound is too slow to reach.
  const double tol = 1e-9;
  const std::size_t cap = 1'000'000;
  double s = 0.0;
  std::size_t i = 1;
  for (; i <= cap; ++i) {
    s += std::pow(static_cast<double>(i), -m);
    const double tail = std::pow(static_cast<double>(i), 1.0 - m) / (m - 1.0);
    if (tail < tol) return s;
  }
  const double N = static_cast<double>(cap);
  // sum_{j>N} j^-m = N^(1-m)/(m-1) - N^-m/2 + m N^(-m-1)/12 - ...
  s += std::pow(N, 1.0 - m) / (m - 1.0) - 0.5 * std::pow(N, -m) + m * std::pow(N, -m - 1.0) / 12.0;
  return s;
}

ReductionParams fp_params(std::size_t n, double p) {
  check_p(p);
  if (n == 0) throw InvalidArgument("n must be positive");
  const std::size_t half = ceil_tol(std::pow(2.0 * static_cast<double>(n), 1.0 / p));
  return {2 * std::max<std::size_t>(half, 1), std::max<std::size_t>(half, 1)};
}

ReducedStream to_fp_stream(const DisjInstance& inst, double p) {
  check_p(p);
  if (inst.k() % 2 != 0 || inst.l() * 2 != inst.k())
    throw InvalidArgument("F_p reduction needs l = k/2");
  const double gap = std::pow(static_cast<double>(inst.l()), p);
  if (gap < 2.0 * static_cast<double>(inst.n()))
    throw InvalidArgument("F_p reduction needs (k/2)^p >= 2n");
  return build(inst, inst.n(), p);
}

double compute_fp(const FrequencyVector& f, double p) {
  long double s = 0.0L;
  for (auto x : f)
    if (x != 0) s += std::pow(static_cast<long double>(std::llabs(x)), static_cast<long double>(p));
  return static_cast<double>(s);
}

bool is_lp_heavy(const FrequencyVector& f, std::size_t i, double p, double eps) {
  if (i >= f.size()) throw InvalidArgument("index out of range");
  if (f[i] == 0) return false;
  const long double lhs = std::pow(static_cast<long double>(std::llabs(f[i])), static_cast<long double>(p));
  const long double rhs = std::pow(static_cast<long double>(eps), static_cast<long double>(p)) *
                          static_cast<long double>(compute_fp(f, p));
  return lhs >= rhs;
}

std::vector<std::size_t> lp_heavy_hitters(const FrequencyVector& f, double p, double eps) {
  const long double thr = std::pow(static_cast<long double>(eps), static_cast<long double>(p)) *
                          static_cast<long double>(compute_fp(f, p));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != 0 &&
        std::pow(static_cast<long double>(std::llabs(f[i])), static_cast<long double>(p)) >= thr)
      out.push_back(i);
  return out;
}

bool is_lp_heavy(const Eigen::VectorXd& x, Eigen::Index i, double p, double eps) {
  if (i < 0 || i >= x.size()) throw InvalidArgument("index out of range");
  if (x[i] == 0.0) return false;
  double fp = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) fp += std::pow(std::abs(x[j]), p);
  return std::pow(std::abs(x[i]), p) >= std::pow(eps, p) * fp;
}

bool is_power_law(const FrequencyVector& f, double zeta, const PowerLawConstants& c, std::string* why) {
  std::vector<double> mags;
  for (auto x : f) mags.push_back(static_cast<double>(std::llabs(x)));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  if (mags.empty()) return true;
  const double top = mags[0];
  for (std::size_t r = 1; r <= mags.size(); ++r) {
    const double shape = top * std::pow(static_cast<double>(r), -zeta);
    const double v = mags[r - 1];
    if (v < c.c_lo * shape - c.additive || v > c.c_hi * shape + c.additive) {
      if (why)
        *why = "rank " + std::to_string(r) + " has magnitude " + std::to_string(v) +
               " outside [" + std::to_string(c.c_lo * shape - c.additive) + ", " +
               std::to_string(c.c_hi * shape + c.additive) + "]";
      return false;
    }
  }
  return true;
}

AdversaryResult linear_sketch_adversary(const Eigen::MatrixXd& M) {
  const Eigen::Index r = M.rows(), n = M.cols();
  if (n == 0) throw InvalidArgument("sketch matrix has no columns");
  const double limit = 1.0 - 1.0 / std::sqrt(2.0);
  if (static_cast<double>(r) > limit * static_cast<double>(n))
    throw InvalidArgument("need r/n <= 1 - 1/sqrt(2) (about 0.29); got r = " + std::to_string(r) +
                          ", n = " + std::to_string(n));
  // Orthonormal basis Q (n x r) of the row space; M^T M e_i becomes Q Q^T e_i.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, r);
  if (r > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M.transpose());
    Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  }
  Eigen::VectorXd proj = Q.rowwise().squaredNorm();
  Eigen::Index istar = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    if (proj[i] < proj[istar]) istar = i;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e[istar] = 1.0;
  Eigen::VectorXd v = e - Q * (Q.transpose() * e);
  Eigen::VectorXd w = v.cwiseAbs();
  w[istar] = 0.0;
  AdversaryResult out;
  out.x1 = w + v;
  out.x2 = w;
  out.istar = istar;
  out.min_projection = proj[istar];
  return out;
}

}  // namespace disjstream
