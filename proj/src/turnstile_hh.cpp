#include "disjstream/turnstile_hh.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "disjstream/errors.hpp"

namespace disjstream {

namespace {

void check_eps_length(double eps, std::uint64_t length_bound) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0,1]");
  if (length_bound == 0) throw InvalidArgument("length bound must be positive");
}

std::size_t ceil_pos(double x) { return static_cast<std::size_t>(std::ceil(x - 1e-9)); }

}  // namespace

BoundedTurnstileHH::BoundedTurnstileHH(std::uint64_t universe, double eps,
                                       std::uint64_t length_bound, std::size_t sparsity)
    : universe_(universe),
      eps_(eps),
      length_bound_(length_bound),
      sparsity_(sparsity),
      mg_pos_(sparsity == 0 ? 1 : sparsity),
      mg_neg_(sparsity == 0 ? 1 : sparsity),
      sketch_(universe == 0 ? 1 : universe, sparsity == 0 ? 1 : sparsity) {
  check_eps_length(eps, length_bound);
  if (universe == 0) throw InvalidArgument("universe must be nonempty");
  if (sparsity == 0) throw InvalidArgument("sparsity must be positive");
}

std::size_t BoundedTurnstileHH::sparsity_for(std::uint64_t length_bound, double eps) {
  check_eps_length(eps, length_bound);
  return std::max<std::size_t>(1, ceil_pos(std::pow(static_cast<double>(length_bound) / eps, 2.0 / 3.0)));
}

BoundedTurnstileHH BoundedTurnstileHH::strict(std::uint64_t universe, double eps,
                                              std::uint64_t length_bound) {
  return BoundedTurnstileHH(universe, eps, length_bound, sparsity_for(length_bound, eps / 4.0));
}

BoundedTurnstileHH BoundedTurnstileHH::linf(std::uint64_t universe, double eps,
                                            std::uint64_t length_bound) {
  check_eps_length(eps, length_bound);
  const std::size_t s =
      ceil_pos(2.0 * std::pow(static_cast<double>(length_bound) / eps, 2.0 / 3.0));
  return BoundedTurnstileHH(universe, eps, length_bound, std::max<std::size_t>(1, s));
}

void BoundedTurnstileHH::update(std::uint64_t index, int sign) {
  if (index >= universe_) throw InvalidArgument("update index outside the universe");
  if (sign != 1 && sign != -1) throw InvalidArgument("updates must be +1 or -1");
  if (pos_count_ + neg_count_ >= length_bound_)
    throw LengthBudgetExceeded("stream longer than the declared bound " +
                               std::to_string(length_bound_));
  if (sign > 0) {
    ++pos_count_;
    mg_pos_.update(index);
  } else {
    ++neg_count_;
    mg_neg_.update(index);
  }
  auto [it, fresh] = pending_.try_emplace(index, 0);
  it->second += sign;
  if (it->second == 0) pending_.erase(it);
  if (pending_.size() >= kBufferFactor * sparsity_) flush();
}

void BoundedTurnstileHH::flush() const {
  if (pending_.empty()) return;
  std::vector<std::pair<std::uint64_t, std::int64_t>> batch(pending_.begin(), pending_.end());
  std::sort(batch.begin(), batch.end());
  sketch_.apply_batch(batch);
  pending_.clear();
}

const SyndromeSketch& BoundedTurnstileHH::sketch() const {
  flush();
  return sketch_;
}

std::int64_t BoundedTurnstileHH::estimate(std::uint64_t i) const {
  return static_cast<std::int64_t>(mg_pos_.estimate(i)) - static_cast<std::int64_t>(mg_neg_.estimate(i));
}

std::vector<std::uint64_t> BoundedTurnstileHH::query_strict() const {
  if (neg_count_ > pos_count_) throw PromiseViolation("more deletions than insertions");
  const std::uint64_t l1 = pos_count_ - neg_count_;
  std::vector<std::uint64_t> out;
  if (l1 <= sparsity_) {
    const auto y = sketch().decode();
    if (!y) throw PromiseViolation("sparse branch failed to decode; x is not nonnegative");
    double norm2 = 0.0;
    for (const auto& [i, v] : *y) {
      if (v < 0) throw PromiseViolation("negative frequency in a strict turnstile stream");
      norm2 += static_cast<double>(v) * static_cast<double>(v);
    }
    const double thr = eps_ * std::sqrt(norm2);
    for (const auto& [i, v] : *y)
      if (static_cast<double>(v) >= thr) out.push_back(i);
    return out;
  }

  const double L = static_cast<double>(pos_count_ + neg_count_);
  const double thr = 3.0 * L / static_cast<double>(sparsity_);
  const auto dpos = static_cast<std::int64_t>(mg_pos_.decrement_rounds());
  const auto dneg = static_cast<std::int64_t>(mg_neg_.decrement_rounds());

  std::set<std::uint64_t> tracked;
  for (const auto& [i, c] : mg_pos_.counters()) tracked.insert(i);
  for (const auto& [i, c] : mg_neg_.counters()) tracked.insert(i);

  // Certified bounds lb_i <= x_i <= ub_i, and a certified lower bound on
  // ||x||_2^2: tracked lower bounds plus untracked mass (integers, so each
  // unit contributes at least 1), and never below ||x||_1.
  struct Row {
    std::uint64_t i;
    std::int64_t est, ub;
  };
  std::vector<Row> rows;
  double lb_sq = 0.0, ub_sum = 0.0;
  for (auto i : tracked) {
    const auto p = static_cast<std::int64_t>(mg_pos_.estimate(i));
    const auto n = static_cast<std::int64_t>(mg_neg_.estimate(i));
    const std::int64_t ub = std::max<std::int64_t>(0, p + dpos - n);
    const std::int64_t lb = std::max<std::int64_t>(0, p - n - dneg);
    lb_sq += static_cast<double>(lb) * static_cast<double>(lb);
    ub_sum += static_cast<double>(ub);
    rows.push_back({i, p - n, ub});
  }
  const double untracked = std::max(0.0, static_cast<double>(l1) - ub_sum);
  const double r_lo = std::sqrt(std::max(static_cast<double>(l1), lb_sq + untracked));

  for (const auto& r : rows)
    if (static_cast<double>(r.est) > thr && static_cast<double>(r.ub) >= eps_ * r_lo)
      out.push_back(r.i);
  return out;
}

LinfEstimate BoundedTurnstileHH::query_linf() const {
  LinfEstimate z;
  const double L = static_cast<double>(pos_count_ + neg_count_);
  const double slack = L / static_cast<double>(sparsity_);
  z.error_bound = 2.0 * slack;

  std::map<std::uint64_t, std::int64_t> xhat;
  for (const auto& [i, c] : mg_pos_.counters()) xhat[i] += static_cast<std::int64_t>(c);
  for (const auto& [i, c] : mg_neg_.counters()) xhat[i] -= static_cast<std::int64_t>(c);
  std::erase_if(xhat, [](const auto& kv) { return kv.second == 0; });

  if (const auto y = sketch().decode()) {
    std::map<std::uint64_t, std::int64_t> yv(y->begin(), y->end());
    double diff = 0.0;
    for (const auto& [i, v] : yv) {
      auto it = xhat.find(i);
      diff = std::max(diff, std::abs(static_cast<double>(v - (it == xhat.end() ? 0 : it->second))));
    }
    for (const auto& [i, v] : xhat)
      if (!yv.count(i)) diff = std::max(diff, std::abs(static_cast<double>(v)));
    if (diff <= slack) {
      z.values = std::move(yv);
      z.from_sparse = true;
      return z;
    }
  }
  z.values = std::move(xhat);
  return z;
}

std::size_t BoundedTurnstileHH::word_count() const {
  // Each Misra-Gries slot and buffered update is an (item, value) pair.
  return 2 * mg_pos_.capacity() + 2 * mg_neg_.capacity() + 2 * sparsity_ +
         2 * kBufferFactor * sparsity_ + 8;
}

nlohmann::json BoundedTurnstileHH::to_json() const {
  flush();
  return {{"universe", universe_},   {"eps", eps_},
          {"length_bound", length_bound_}, {"sparsity", sparsity_},
          {"positives", pos_count_}, {"negatives", neg_count_},
          {"mg_pos", mg_pos_.to_json()}, {"mg_neg", mg_neg_.to_json()},
          {"syndromes", sketch_.syndromes()}};
}

BoundedTurnstileHH BoundedTurnstileHH::from_json(const nlohmann::json& j) {
  BoundedTurnstileHH h(j.at("universe").get<std::uint64_t>(), j.at("eps").get<double>(),
                       j.at("length_bound").get<std::uint64_t>(), j.at("sparsity").get<std::size_t>());
  h.pos_count_ = j.at("positives").get<std::uint64_t>();
  h.neg_count_ = j.at("negatives").get<std::uint64_t>();
  h.mg_pos_ = MisraGriesSummary::from_json(j.at("mg_pos"));
  h.mg_neg_ = MisraGriesSummary::from_json(j.at("mg_neg"));
  const auto syn = j.at("syndromes").get<std::vector<std::uint64_t>>();
  std::vector<std::uint8_t> bytes;
  auto put = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xff));
  };
  put(gf::kModulus);
  put(h.sparsity_);
  put(gf::kGenerator);
  for (auto s : syn) put(s);
  h.sketch_ = SyndromeSketch::deserialize(bytes, h.universe_);
  return h;
}

}  // namespace disjstream
