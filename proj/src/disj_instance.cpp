#include "disjstream/disj_instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "disjstream/errors.hpp"
#include "disjstream/rng.hpp"

namespace disjstream {

std::string to_string(Label l) { return l == Label::kYes ? "YES" : "NO"; }

Label label_from_string(const std::string& s) {
  std::string u;
  for (char ch : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  if (u == "YES" || u == "1") return Label::kYes;
  if (u == "NO" || u == "0") return Label::kNo;
  throw InvalidArgument("label must be YES or NO, got '" + s + "'");
}

DisjInstance::DisjInstance(std::size_t n, std::size_t k, std::size_t l)
    : n_(n), k_(k), l_(l), bits_(n * k, 0) {
  if (n == 0 || k == 0) throw InvalidArgument("n and k must be positive");
  if (l == 0 || l > k) throw InvalidArgument("l must lie in [1, k]");
}

void DisjInstance::set_bit(std::size_t player, std::size_t i, bool v) {
  if (player >= k_ || i >= n_) throw InvalidArgument("bit position out of range");
  bits_[player * n_ + i] = v ? 1 : 0;
}

std::vector<std::size_t> DisjInstance::row(std::size_t player) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i)
    if (bit(player, i)) out.push_back(i);
  return out;
}

std::size_t DisjInstance::row_size(std::size_t player) const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < n_; ++i) s += bit(player, i);
  return s;
}

std::uint64_t DisjInstance::row_mask(std::size_t player) const {
  if (n_ > 64) throw InvalidArgument("row masks need n <= 64");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < n_; ++i)
    if (bit(player, i)) m |= std::uint64_t{1} << i;
  return m;
}

std::vector<std::uint64_t> DisjInstance::row_masks() const {
  std::vector<std::uint64_t> out;
  for (std::size_t j = 0; j < k_; ++j) out.push_back(row_mask(j));
  return out;
}

std::size_t DisjInstance::column_weight(std::size_t i) const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < k_; ++j) s += bit(j, i);
  return s;
}

nlohmann::json DisjInstance::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t j = 0; j < k_; ++j) rows.push_back(row(j));
  nlohmann::json j = {{"n", n_}, {"k", k_}, {"l", l_}, {"rows", rows}, {"label", to_string(label)}};
  if (star) j["star"] = *star;
  return j;
}

DisjInstance DisjInstance::from_json(const nlohmann::json& j) {
  DisjInstance inst(j.at("n").get<std::size_t>(), j.at("k").get<std::size_t>(),
                    j.at("l").get<std::size_t>());
  const auto& rows = j.at("rows");
  if (rows.size() != inst.k()) throw InvalidArgument("rows must list one set per player");
  for (std::size_t p = 0; p < rows.size(); ++p)
    for (const auto& i : rows[p]) inst.set_bit(p, i.get<std::size_t>(), true);
  if (j.contains("label")) inst.label = label_from_string(j.at("label").get<std::string>());
  if (j.contains("star") && !j.at("star").is_null()) inst.star = j.at("star").get<std::size_t>();
  return inst;
}

PromiseReport verify_promise(const DisjInstance& inst) {
  PromiseReport r;
  std::vector<std::size_t> heavy;
  for (std::size_t i = 0; i < inst.n(); ++i)
    if (inst.column_weight(i) >= 2) heavy.push_back(i);
  if (heavy.empty()) {
    r.label = Label::kNo;
    return r;
  }
  if (heavy.size() == 1 && inst.column_weight(heavy[0]) == inst.l()) {
    r.label = Label::kYes;
    r.star = heavy[0];
    return r;
  }
  r.violating_columns = heavy;
  r.reason = heavy.size() == 1 ? "column weight differs from l"
                               : "more than one column has weight >= 2";
  return r;
}

namespace {

void check_params(std::size_t n, std::size_t k, std::size_t l) {
  if (n == 0) throw InvalidArgument("n must be positive");
  if (k == 0) throw InvalidArgument("k must be positive");
  if (l < 1 || l > k) throw InvalidArgument("l must lie in [1, k]");
}

std::vector<std::size_t> random_subset(Rng& rng, std::size_t k, std::size_t l) {
  std::vector<std::size_t> all(k);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < l; ++i) std::swap(all[i], all[i + uniform_below(rng, k - i)]);
  all.resize(l);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

HardDistSample sample_eta(std::size_t n, std::size_t k, std::size_t l, int z, std::uint64_t seed) {
  check_params(n, k, l);
  if (z != 0 && z != 1) throw InvalidArgument("z must be 0 or 1");
  if (z == 1 && l < 2) throw InvalidArgument("l >= 2 is needed for a YES instance");
  Rng rng(seed);
  HardDistSample s;
  s.instance = DisjInstance(n, k, l);
  s.z = z;
  s.owners.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.owners[i] = uniform_below(rng, k);
    if (bernoulli(rng, 0.5)) s.instance.set_bit(s.owners[i], i, true);
  }
  s.special = uniform_below(rng, n);
  if (z == 1) {
    s.owner_set = random_subset(rng, k, l);
    for (std::size_t j = 0; j < k; ++j) s.instance.set_bit(j, s.special, false);
    for (std::size_t j : s.owner_set) s.instance.set_bit(j, s.special, true);
    s.instance.label = Label::kYes;
    s.instance.star = s.special;
  } else {
    s.instance.label = Label::kNo;
  }
  return s;
}

namespace {

// Deals the listed columns to players round-robin after a shuffle so that set
// sizes differ by at most one.
void deal_columns(DisjInstance& inst, std::vector<std::size_t> cols, Rng& rng) {
  for (std::size_t i = cols.size(); i > 1; --i) std::swap(cols[i - 1], cols[uniform_below(rng, i)]);
  std::vector<std::size_t> order(inst.k());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
  for (std::size_t t = 0; t < cols.size(); ++t) inst.set_bit(order[t % order.size()], cols[t], true);
}

}  // namespace

DisjInstance adversarial_no(std::size_t n, std::size_t k, std::size_t l, std::uint64_t seed) {
  check_params(n, k, l);
  Rng rng(seed);
  DisjInstance inst(n, k, l);
  std::vector<std::size_t> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  deal_columns(inst, cols, rng);
  inst.label = Label::kNo;
  return inst;
}

DisjInstance adversarial_yes(std::size_t n, std::size_t k, std::size_t l, std::uint64_t seed) {
  check_params(n, k, l);
  if (l < 2) throw InvalidArgument("l >= 2 is needed for a YES instance");
  Rng rng(seed);
  DisjInstance inst(n, k, l);
  const std::size_t star = uniform_below(rng, n);
  for (std::size_t j : random_subset(rng, k, l)) inst.set_bit(j, star, true);
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < n; ++i)
    if (i != star) cols.push_back(i);
  deal_columns(inst, cols, rng);
  inst.label = Label::kYes;
  inst.star = star;
  return inst;
}

std::size_t default_l(std::size_t k, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("c must lie in (0,1]");
  const double ck = c * static_cast<double>(k);
  const double r = std::round(ck);
  return static_cast<std::size_t>(std::abs(ck - r) < 1e-9 ? r : std::ceil(ck));
}

}  // namespace disjstream
