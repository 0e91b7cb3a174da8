#include "disjstream/disj_protocols.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "disjstream/clean.hpp"

namespace disjstream {

std::string to_string(PublishEncoding e) {
  switch (e) {
    case PublishEncoding::kSubset:
      return "subset";
    case PublishEncoding::kSizeCombination:
      return "size-combination";
    case PublishEncoding::kAdaptive:
      return "adaptive";
  }
  return "adaptive";
}

PublishEncoding publish_encoding_from_string(const std::string& s) {
  if (s == "subset") return PublishEncoding::kSubset;
  if (s == "size-combination") return PublishEncoding::kSizeCombination;
  if (s == "adaptive") return PublishEncoding::kAdaptive;
  throw InvalidArgument("unknown publish encoding '" + s + "'");
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    c = c * (n - r + i) / i;
    if (c > ~std::uint64_t{0}) throw InvalidArgument("binomial coefficient overflows 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

namespace {

// Bits of `x` at the positions of `universe`, packed to the low end.
std::uint64_t compress(std::uint64_t x, std::uint64_t universe) {
  std::uint64_t out = 0;
  int pos = 0;
  for (std::uint64_t u = universe; u; u &= u - 1, ++pos)
    if (x & (u & (~u + 1))) out |= std::uint64_t{1} << pos;
  return out;
}

std::uint64_t expand(std::uint64_t packed, std::uint64_t universe) {
  std::uint64_t out = 0;
  int pos = 0;
  for (std::uint64_t u = universe; u; u &= u - 1, ++pos)
    if (packed & (std::uint64_t{1} << pos)) out |= u & (~u + 1);
  return out;
}

std::uint64_t full_mask(std::size_t n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

}  // namespace

std::uint64_t combination_rank(std::uint64_t universe, std::uint64_t subset) {
  if (subset & ~universe) throw InvalidArgument("subset is not inside the universe");
  const std::uint64_t packed = compress(subset, universe);
  std::uint64_t rank = 0;
  std::uint64_t i = 1;
  for (std::uint64_t m = packed; m; m &= m - 1, ++i)
    rank += binomial(static_cast<std::uint64_t>(std::countr_zero(m)), i);
  return rank;
}

std::uint64_t combination_unrank(std::uint64_t universe, std::uint64_t size, std::uint64_t rank) {
  const auto u = static_cast<std::uint64_t>(std::popcount(universe));
  if (size > u || rank >= binomial(u, size)) throw InvalidArgument("combination rank out of range");
  std::uint64_t packed = 0;
  std::uint64_t pos = u;
  for (std::uint64_t i = size; i >= 1; --i) {
    // Largest position p with C(p, i) <= rank.
    std::uint64_t p = pos - 1;
    while (binomial(p, i) > rank) --p;
    packed |= std::uint64_t{1} << p;
    rank -= binomial(p, i);
    pos = p;
  }
  return expand(packed, universe);
}

double epsilon_publish_failure_probability(std::size_t l, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in [0,1]");
  const double q = 1.0 - eps;
  return std::pow(q, static_cast<double>(l)) +
         static_cast<double>(l) * eps * std::pow(q, static_cast<double>(l) - 1.0);
}

// ---------------------------------------------------------------------------
// Publish protocol

namespace {

enum class PublishKind { kSubset, kSize, kCombination, kLast };

struct PublishStep {
  bool done = false;
  bool collided = false;
  int player = 0;
  PublishKind kind = PublishKind::kLast;
  std::uint64_t alphabet = 1;
  std::uint64_t claimed = 0;
  std::uint64_t unclaimed = 0;
  std::uint64_t size = 0;  // pending |T| for a combination message
};

struct PublishRules {
  std::size_t n = 0, k = 0, l = 0;
  double eps = 1.0;
  PublishEncoding encoding = PublishEncoding::kAdaptive;

  bool use_subset(std::uint64_t u) const {
    switch (encoding) {
      case PublishEncoding::kSubset:
        return true;
      case PublishEncoding::kSizeCombination:
        return false;
      case PublishEncoding::kAdaptive:
        return u < kAdaptiveSubsetLimit;
    }
    return false;
  }

  // Replays the board and describes what happens next.
  PublishStep step(const Transcript& t) const {
    const std::uint64_t full = full_mask(n);
    PublishStep s;
    std::size_t idx = 0;
    auto finish = [&](bool collided) {
      if (idx != t.size()) throw SpecificationIncomplete("messages after the end of the protocol");
      s.done = true;
      s.collided = collided;
      return s;
    };
    for (std::size_t j = 0; j < k; ++j) {
      s.player = static_cast<int>(j);
      if (j + 1 == k) {
        if (s.claimed == 0) return finish(false);
        s.kind = PublishKind::kLast;
        s.alphabet = 2;
        if (idx == t.size()) return s;
        return ++idx, finish(t[idx - 1].symbol == 1);
      }
      s.unclaimed = full & ~s.claimed;
      const auto u = static_cast<std::uint64_t>(std::popcount(s.unclaimed));
      const std::uint64_t coll = s.claimed != 0 ? 1 : 0;
      if (use_subset(u)) {
        s.kind = PublishKind::kSubset;
        s.alphabet = (std::uint64_t{1} << u) + coll;
        if (s.alphabet == 1) continue;
        if (idx == t.size()) return s;
        const Symbol sym = t[idx++].symbol;
        if (coll && sym == (std::uint64_t{1} << u)) return finish(true);
        s.claimed |= expand(sym, s.unclaimed);
      } else {
        s.kind = PublishKind::kSize;
        s.alphabet = u + 1 + coll;
        if (s.alphabet == 1) continue;
        if (idx == t.size()) return s;
        const Symbol sym = t[idx++].symbol;
        if (coll && sym == u + 1) return finish(true);
        const std::uint64_t c = binomial(u, sym);
        std::uint64_t chosen = sym == 0 ? 0 : s.unclaimed;
        if (c > 1) {
          s.kind = PublishKind::kCombination;
          s.alphabet = c;
          s.size = sym;
          if (idx == t.size()) return s;
          chosen = combination_unrank(s.unclaimed, sym, t[idx++].symbol);
        }
        s.claimed |= chosen;
      }
    }
    return finish(false);
  }
};

class PublishBehavior final : public PlayerBehavior {
 public:
  PublishBehavior(std::shared_ptr<const PublishRules> rules, int player)
      : rules_(std::move(rules)), player_(player) {}

  std::vector<Move> moves(const Transcript& prefix, PlayerInput input, PlayerState) const override {
    const auto s = current(prefix);
    const double eps = rules_->eps, q = 1.0 - eps;
    const std::uint64_t owned = input & full_mask(rules_->n);
    const int c_own = std::popcount(owned & s.claimed);
    const double no_coll = std::pow(q, c_own);
    const std::uint64_t free_own = owned & s.unclaimed;
    const int f = std::popcount(free_own);
    std::vector<Move> out;
    auto push = [&](Symbol sym, double p) {
      if (p > 0.0) out.push_back({sym, 0, p});
    };
    auto subset_prob = [&](int size) { return no_coll * std::pow(eps, size) * std::pow(q, f - size); };
    switch (s.kind) {
      case PublishKind::kLast:
        push(0, no_coll);
        push(1, 1.0 - no_coll);
        break;
      case PublishKind::kSubset: {
        if (f > 20) throw StateSpaceOverflow("too many owned elements to enumerate");
        const auto u = std::popcount(s.unclaimed);
        for (std::uint64_t packed = 0; packed < (std::uint64_t{1} << f); ++packed) {
          const std::uint64_t T = expand(packed, free_own);
          push(compress(T, s.unclaimed), subset_prob(std::popcount(T)));
        }
        if (s.claimed) push(std::uint64_t{1} << u, 1.0 - no_coll);
        break;
      }
      case PublishKind::kSize: {
        const auto u = static_cast<std::uint64_t>(std::popcount(s.unclaimed));
        for (int t = 0; t <= f; ++t)
          push(static_cast<Symbol>(t),
               static_cast<double>(binomial(static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(t))) *
                   subset_prob(t));
        if (s.claimed) push(u + 1, 1.0 - no_coll);
        break;
      }
      case PublishKind::kCombination: {
        const std::uint64_t total = binomial(static_cast<std::uint64_t>(f), s.size);
        if (total == 0) throw SpecificationIncomplete("announced size exceeds the player's set");
        if (total > (std::uint64_t{1} << 20))
          throw StateSpaceOverflow("too many combinations to enumerate");
        for (std::uint64_t r = 0; r < total; ++r)
          push(combination_rank(s.unclaimed, combination_unrank(free_own, s.size, r)),
               1.0 / static_cast<double>(total));
        break;
      }
    }
    return out;
  }

  Move sample(const Transcript& prefix, PlayerInput input, PlayerState, Rng& rng) const override {
    const auto s = current(prefix);
    const std::uint64_t owned = input & full_mask(rules_->n);
    // Same (seed, player, round) key for every message of this turn, so the
    // draws below are replayed identically for the size and rank messages.
    std::uint64_t picked = 0;
    for (std::uint64_t m = owned; m; m &= m - 1)
      if (bernoulli(rng, rules_->eps)) picked |= m & (~m + 1);
    const bool coll = (picked & s.claimed) != 0;
    const std::uint64_t T = picked & s.unclaimed;
    const auto u = static_cast<std::uint64_t>(std::popcount(s.unclaimed));
    switch (s.kind) {
      case PublishKind::kLast:
        return {coll ? Symbol{1} : Symbol{0}, 0, 1.0};
      case PublishKind::kSubset:
        return {coll ? (std::uint64_t{1} << u) : compress(T, s.unclaimed), 0, 1.0};
      case PublishKind::kSize:
        return {coll ? u + 1 : static_cast<Symbol>(std::popcount(T)), 0, 1.0};
      case PublishKind::kCombination:
        if (static_cast<std::uint64_t>(std::popcount(T)) != s.size)
          throw SpecificationIncomplete("replayed selection disagrees with the announced size");
        return {combination_rank(s.unclaimed, T), 0, 1.0};
    }
    return {};
  }

 private:
  PublishStep current(const Transcript& prefix) const {
    auto s = rules_->step(prefix);
    if (s.done || s.player != player_) throw SpecificationIncomplete("not this player's turn");
    return s;
  }

  std::shared_ptr<const PublishRules> rules_;
  int player_;
};

}  // namespace

ProtocolSpec epsilon_publish_protocol(std::size_t n, std::size_t k, std::size_t l, double eps,
                                      PublishEncoding encoding) {
  if (n == 0 || n > 64) throw InvalidArgument("publish protocols need 1 <= n <= 64");
  if (k == 0) throw InvalidArgument("k must be positive");
  if (l < 1 || l > k) throw InvalidArgument("l must lie in [1, k]");
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in [0,1]");
  if (encoding == PublishEncoding::kSubset && n > 62)
    throw InvalidArgument("subset encoding needs n <= 62");
  auto rules = std::make_shared<PublishRules>();
  rules->n = n;
  rules->k = k;
  rules->l = l;
  rules->eps = eps;
  rules->encoding = encoding;
  auto scheduler = [rules](const Transcript& t) -> std::optional<Turn> {
    const auto s = rules->step(t);
    if (s.done) return std::nullopt;
    return Turn{s.player, s.alphabet, 0};
  };
  auto output = [rules](const Transcript& t) { return rules->step(t).collided; };
  std::vector<BehaviorPtr> behaviors;
  for (std::size_t j = 0; j < k; ++j)
    behaviors.push_back(std::make_shared<PublishBehavior>(rules, static_cast<int>(j)));
  nlohmann::json desc = {{"protocol", eps == 1.0 ? "deterministic" : "eps-publish"},
                         {"n", n},
                         {"k", k},
                         {"l", l},
                         {"eps", eps},
                         {"encoding", to_string(encoding)}};
  return ProtocolSpec(static_cast<int>(k), scheduler, behaviors, output, desc);
}

ProtocolSpec deterministic_disj_protocol(std::size_t n, std::size_t k, PublishEncoding encoding) {
  return epsilon_publish_protocol(n, k, k >= 2 ? 2 : 1, 1.0, encoding);
}

// ---------------------------------------------------------------------------
// Pigeonhole protocol

namespace {

enum class PigeonKind { kSmall, kSize, kRank, kConfirm };

struct PigeonStep {
  bool done = false;
  bool output = false;
  int player = 0;
  PigeonKind kind = PigeonKind::kSmall;
  std::uint64_t alphabet = 2;
  std::uint64_t posted = 0;
  std::uint64_t size = 0;
};

struct PigeonRules {
  std::size_t n = 0, k = 0;
  std::uint64_t tau = 0;

  PigeonStep step(const Transcript& t) const {
    PigeonStep s;
    std::size_t idx = 0;
    auto finish = [&](bool out) {
      if (idx != t.size()) throw SpecificationIncomplete("messages after the end of the protocol");
      s.done = true;
      s.output = out;
      return s;
    };
    int poster = -1;
    for (std::size_t j = 0; j < k && poster < 0; ++j) {
      s.player = static_cast<int>(j);
      s.kind = PigeonKind::kSmall;
      s.alphabet = 2;
      if (idx == t.size()) return s;
      if (t[idx++].symbol == 1) poster = static_cast<int>(j);
    }
    if (poster < 0) return finish(false);
    s.player = poster;
    s.kind = PigeonKind::kSize;
    s.alphabet = tau + 1;
    if (idx == t.size()) return s;
    s.size = t[idx++].symbol;
    const std::uint64_t full = full_mask(n);
    const std::uint64_t c = binomial(n, s.size);
    if (c > 1) {
      s.kind = PigeonKind::kRank;
      s.alphabet = c;
      if (idx == t.size()) return s;
      s.posted = combination_unrank(full, s.size, t[idx++].symbol);
    } else {
      s.posted = s.size == 0 ? 0 : full;
    }
    if (s.size == 0) return finish(false);
    if (k == 1) return finish(true);
    s.player = poster == 0 ? 1 : 0;
    s.kind = PigeonKind::kConfirm;
    s.alphabet = 2;
    if (idx == t.size()) return s;
    const bool hit = t[idx++].symbol == 1;
    return finish(hit);
  }
};

class PigeonBehavior final : public PlayerBehavior {
 public:
  PigeonBehavior(std::shared_ptr<const PigeonRules> rules, int player)
      : rules_(std::move(rules)), player_(player) {}

  std::vector<Move> moves(const Transcript& prefix, PlayerInput input, PlayerState) const override {
    const auto s = rules_->step(prefix);
    if (s.done || s.player != player_) throw SpecificationIncomplete("not this player's turn");
    const std::uint64_t set = input & full_mask(rules_->n);
    const auto size = static_cast<std::uint64_t>(std::popcount(set));
    Symbol sym = 0;
    switch (s.kind) {
      case PigeonKind::kSmall:
        sym = size <= rules_->tau ? 1 : 0;
        break;
      case PigeonKind::kSize:
        sym = size;
        break;
      case PigeonKind::kRank:
        sym = combination_rank(full_mask(rules_->n), set);
        break;
      case PigeonKind::kConfirm:
        sym = (set & s.posted) ? 1 : 0;
        break;
    }
    return {{sym, 0, 1.0}};
  }

 private:
  std::shared_ptr<const PigeonRules> rules_;
  int player_;
};

}  // namespace

ProtocolSpec pigeonhole_promise_protocol(std::size_t n, std::size_t k) {
  if (n == 0 || n > 64) throw InvalidArgument("pigeonhole protocol needs 1 <= n <= 64");
  if (k == 0) throw InvalidArgument("k must be positive");
  auto rules = std::make_shared<PigeonRules>();
  rules->n = n;
  rules->k = k;
  rules->tau = (n + k - 1) / k;
  auto scheduler = [rules](const Transcript& t) -> std::optional<Turn> {
    const auto s = rules->step(t);
    if (s.done) return std::nullopt;
    return Turn{s.player, s.alphabet, 0};
  };
  auto output = [rules](const Transcript& t) { return rules->step(t).output; };
  std::vector<BehaviorPtr> behaviors;
  for (std::size_t j = 0; j < k; ++j)
    behaviors.push_back(std::make_shared<PigeonBehavior>(rules, static_cast<int>(j)));
  return ProtocolSpec(static_cast<int>(k), scheduler, behaviors, output,
                      {{"protocol", "pigeonhole"}, {"n", n}, {"k", k}});
}

ProtocolSpec protocol_from_json(const nlohmann::json& j) {
  const auto name = j.at("protocol").get<std::string>();
  if (name == "tabular") return TabularProtocol::from_json(j).to_spec();
  if (name == "deterministic" || name == "eps-publish") {
    const auto encoding = publish_encoding_from_string(j.value("encoding", std::string("adaptive")));
    const auto k = j.at("k").get<std::size_t>();
    return epsilon_publish_protocol(j.at("n").get<std::size_t>(), k,
                                    j.value("l", k >= 2 ? std::size_t{2} : std::size_t{1}),
                                    j.value("eps", 1.0), encoding);
  }
  if (name == "pigeonhole")
    return pigeonhole_promise_protocol(j.at("n").get<std::size_t>(), j.at("k").get<std::size_t>());
  if (name == "clean") return clean_simulate(protocol_from_json(j.at("base")), j.at("player").get<int>());
  throw InvalidArgument("unknown protocol '" + name + "'");
}

}  // namespace disjstream
