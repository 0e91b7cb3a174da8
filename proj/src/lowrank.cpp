#include "disjstream/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "disjstream/errors.hpp"
#include "disjstream/rng.hpp"

namespace disjstream {

namespace {

std::size_t exact_sqrt(std::size_t d) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
  while (r * r > d) --r;
  while ((r + 1) * (r + 1) <= d) ++r;
  if (r * r != d) throw InvalidArgument("d must be a perfect square");
  return r;
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

}  // namespace

std::vector<std::size_t> RowStreamInstance::rows() const {
  std::vector<std::size_t> out;
  for (const auto& s : sets) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<std::size_t> RowStreamInstance::first_half_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < midpoint_sets(); ++j) out.insert(out.end(), sets[j].begin(), sets[j].end());
  return out;
}

std::vector<std::size_t> RowStreamInstance::second_half_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t j = midpoint_sets(); j < sets.size(); ++j)
    out.insert(out.end(), sets[j].begin(), sets[j].end());
  return out;
}

UpdateStream RowStreamInstance::to_stream() const {
  UpdateStream out;
  for (auto i : rows()) out.push_back({static_cast<std::uint32_t>(i), 1});
  return out;
}

nlohmann::json RowStreamInstance::to_json() const {
  nlohmann::json j = {{"d", d}, {"sets", sets}, {"label", to_string(label)}};
  if (star) j["star"] = *star;
  return j;
}

RowStreamInstance RowStreamInstance::from_json(const nlohmann::json& j) {
  RowStreamInstance r;
  r.d = j.at("d").get<std::size_t>();
  r.sets = j.at("sets").get<std::vector<std::vector<std::size_t>>>();
  r.label = label_from_string(j.at("label").get<std::string>());
  if (j.contains("star") && !j.at("star").is_null()) r.star = j.at("star").get<std::size_t>();
  for (const auto& s : r.sets)
    for (auto i : s)
      if (i >= r.d) throw InvalidArgument("set element outside [d]");
  return r;
}

CountsProfile CountsProfile::from_rows(std::size_t d, const std::vector<std::size_t>& rows) {
  CountsProfile c;
  c.counts.assign(d, 0);
  for (auto i : rows) {
    if (i >= d) throw InvalidArgument("row index outside [d]");
    ++c.counts[i];
  }
  return c;
}

std::uint64_t CountsProfile::frobenius_sq() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::size_t lowrank_star_multiplicity(std::size_t d) {
  const std::size_t m = exact_sqrt(d);
  return (2 * m + 2) / 3;
}

RowStreamInstance gen_lowrank_instance(std::size_t d, Label label, std::uint64_t seed) {
  if (d < 4) throw InvalidArgument("d must be at least 4");
  const std::size_t m = exact_sqrt(d);
  const std::size_t size = (m + 1) / 2;
  Rng rng(seed);
  RowStreamInstance inst;
  inst.d = d;
  inst.label = label;
  inst.sets.assign(m, {});
  std::vector<std::size_t> pool(d);
  std::iota(pool.begin(), pool.end(), 0);
  shuffle(pool, rng);

  std::vector<std::size_t> holders;
  if (label == Label::kYes) {
    const std::size_t t = lowrank_star_multiplicity(d);
    const std::size_t half = m / 2;
    const double need = static_cast<double>(m) / 6.0;
    // Redraw until both halves see the star at least m/6 times (and once).
    for (;;) {
      std::vector<std::size_t> all(m);
      std::iota(all.begin(), all.end(), 0);
      shuffle(all, rng);
      holders.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(t));
      std::size_t first = 0;
      for (auto h : holders) first += h < half;
      const std::size_t second = t - first;
      if (static_cast<double>(first) >= need && static_cast<double>(second) >= need && first >= 1 && second >= 1)
        break;
    }
    std::sort(holders.begin(), holders.end());
    inst.star = pool.back();
    pool.pop_back();
  }
  const std::size_t needed = m * size - holders.size();
  if (needed > pool.size()) throw InvalidArgument("d too small for disjoint sets");
  std::size_t next = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const bool has_star = std::binary_search(holders.begin(), holders.end(), j);
    if (has_star) inst.sets[j].push_back(*inst.star);
    while (inst.sets[j].size() < size) inst.sets[j].push_back(pool[next++]);
    shuffle(inst.sets[j], rng);
  }
  return inst;
}

double residual_rank1(const CountsProfile& counts, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != counts.counts.size())
    throw InvalidArgument("v has the wrong dimension");
  if (std::abs(v.norm() - 1.0) > 1e-9) throw InvalidArgument("v must be a unit vector");
  double total = 0.0, captured = 0.0;
  for (std::size_t i = 0; i < counts.counts.size(); ++i) {
    const double c = static_cast<double>(counts.counts[i]);
    total += c;
    captured += c * v[static_cast<Eigen::Index>(i)] * v[static_cast<Eigen::Index>(i)];
  }
  return total - captured;
}

Label identify_star(const Eigen::VectorXd& v, double tau, const std::vector<std::size_t>& second_half_rows) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  std::vector<std::size_t> T;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (v[j] * v[j] >= tau) T.push_back(static_cast<std::size_t>(j));
  if (T.size() > kMaxHeavyCoordinates)
    throw InvalidArgument("more than " + std::to_string(kMaxHeavyCoordinates) +
                          " coordinates pass the mass threshold; v is not concentrated");
  std::set<std::size_t> later(second_half_rows.begin(), second_half_rows.end());
  std::size_t hits = 0;
  for (auto j : T) hits += later.count(j);
  return hits == 1 ? Label::kYes : Label::kNo;
}

Eigen::VectorXd top_singular_vector(const CountsProfile& counts) {
  const auto d = static_cast<Eigen::Index>(counts.counts.size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) gram(i, i) = static_cast<double>(counts.counts[static_cast<std::size_t>(i)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  Eigen::VectorXd v = es.eigenvectors().col(d - 1);
  return v / v.norm();
}

double mass_threshold(double C, double c_star, double F) {
  if (!(c_star > 1.0)) throw InvalidArgument("star count must exceed 1");
  return (C * (c_star - F) + F - 1.0) / (c_star - 1.0);
}

double approximation_constant(const std::vector<std::size_t>& dims, double target) {
  double best = std::numeric_limits<double>::infinity();
  for (auto d : dims) {
    const std::size_t m = exact_sqrt(d);
    const double F = static_cast<double>((m / 2) * ((m + 1) / 2));
    const double c_star = std::ceil(static_cast<double>(m) / 6.0 - 1e-12);
    // Solve mass_threshold(C) = target for C.
    const double C = (F - 1.0 - target * (c_star - 1.0)) / (F - c_star);
    best = std::min(best, C);
  }
  return best;
}

}  // namespace disjstream
