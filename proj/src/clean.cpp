#include "disjstream/clean.hpp"

#include <array>
#include <mutex>
#include <stdexcept>
#include <string>

namespace disjstream {

namespace {

struct CleanRecord {
  double delta = 0.0;
  FiniteDistribution common;
  std::array<FiniteDistribution, 2> part;
};

class CleanBehavior final : public PlayerBehavior {
 public:
  CleanBehavior(BehaviorPtr original, int player) : original_(std::move(original)), player_(player) {}

  std::vector<Move> moves(const Transcript& prefix, PlayerInput input,
                          PlayerState state) const override {
    if (input > 1) throw InvalidArgument("clean simulation needs input bits");
    const auto rec = record_for(prefix);
    const auto& part = rec->part[input];
    std::vector<Move> out;
    auto push = [&](Atom a, PlayerState next, double p) {
      if (!(p > 0.0)) return;
      if (a < 0) throw std::logic_error("reserved atom emitted with positive probability");
      out.push_back({static_cast<Symbol>(a), next, p});
    };
    if (state == 0) {
      for (const auto& [a, p] : rec->common.probs()) push(a, 0, (1.0 - rec->delta) * p);
      for (const auto& [a, p] : part.probs()) push(a, 1, rec->delta * p);
    } else {
      for (const auto& [a, p] : part.probs()) push(a, 1, p);
    }
    return out;
  }

  bool stateless() const override { return false; }

 private:
  std::shared_ptr<const CleanRecord> record_for(const Transcript& prefix) const {
    const auto key = prefix.symbols();
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    // Posterior weights of (not observed, observed) for each value of the bit,
    // driven by this player's own earlier messages only.
    std::array<double, 2> unobserved{1.0, 1.0}, observed{0.0, 0.0};
    for (std::size_t s = 0; s < prefix.size(); ++s) {
      if (prefix[s].player != player_) continue;
      const auto earlier = record_for(prefix.prefix(s));
      const auto x = static_cast<Atom>(prefix[s].symbol);
      for (int b = 0; b < 2; ++b) {
        const double px = earlier->part[static_cast<std::size_t>(b)](x);
        const double nu = unobserved[b] * (1.0 - earlier->delta) * earlier->common(x);
        const double ob = unobserved[b] * earlier->delta * px + observed[b] * px;
        unobserved[b] = nu;
        observed[b] = ob;
      }
    }
    std::array<double, 2> p{};
    for (int b = 0; b < 2; ++b) {
      const double tot = unobserved[b] + observed[b];
      p[b] = tot > 0.0 ? observed[b] / tot : 0.0;
    }
    if (p[0] > 0.0 && p[1] > 0.0)
      throw std::logic_error("player observed both input values on one transcript");

    std::array<FiniteDistribution, 2> d;
    for (int b = 0; b < 2; ++b) {
      FiniteDistribution::Map m;
      for (const auto& mv : original_->moves(prefix, static_cast<PlayerInput>(b), 0))
        if (mv.prob > 0.0) m[static_cast<Atom>(mv.symbol)] += mv.prob;
      d[b] = FiniteDistribution::unchecked(std::move(m));
    }

    auto rec = std::make_shared<CleanRecord>();
    if (p[1] == 0.0) {
      auto dec = decompose(d[0], d[1], p[0]);
      rec->delta = dec.delta;
      rec->common = std::move(dec.common);
      rec->part[0] = std::move(dec.zeroPart);
      rec->part[1] = std::move(dec.onePart);
    } else {
      auto dec = decompose(d[1], d[0], p[1]);
      rec->delta = dec.delta;
      rec->common = std::move(dec.common);
      rec->part[1] = std::move(dec.zeroPart);
      rec->part[0] = std::move(dec.onePart);
    }
    std::lock_guard<std::mutex> lock(mu_);
    return memo_.emplace(key, std::move(rec)).first->second;
  }

  BehaviorPtr original_;
  int player_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<Symbol>, std::shared_ptr<const CleanRecord>> memo_;
};

}  // namespace

ProtocolSpec clean_simulate(const ProtocolSpec& spec, int player) {
  auto original = spec.behavior_ptr(player);
  if (spec.is_clean_for(player)) return spec;
  if (!original->stateless())
    throw InvalidArgument("player " + std::to_string(player) + " is stateful; cannot clean it");
  nlohmann::json desc = {{"protocol", "clean"}, {"player", player}, {"base", spec.descriptor()}};
  return spec.with_behavior(player, std::make_shared<CleanBehavior>(original, player), true)
      .with_descriptor(std::move(desc));
}

double observation_probability(const ProtocolSpec& clean_spec, int player) {
  return observation_probability(
      clean_spec, player, std::vector<PlayerInput>(static_cast<std::size_t>(clean_spec.players()), 0));
}

double observation_probability(const ProtocolSpec& clean_spec, int player,
                               const std::vector<PlayerInput>& inputs) {
  return observation_probability_any(clean_spec, {player}, inputs);
}

double observation_probability_any(const ProtocolSpec& clean_spec, const std::vector<int>& group,
                                   const std::vector<PlayerInput>& inputs) {
  for (int j : group)
    if (!clean_spec.is_clean_for(j))
      throw InvalidArgument("protocol is not clean for player " + std::to_string(j));
  double s = 0.0;
  for (const auto& leaf : enumerate_transcripts(clean_spec, inputs)) {
    for (int j : group) {
      if (leaf.states[static_cast<std::size_t>(j)] == 1) {
        s += leaf.prob;
        break;
      }
    }
  }
  return s;
}

}  // namespace disjstream
