#include "disjstream/protocol.hpp"

#include <bit>
#include <limits>
#include <string>

namespace disjstream {

std::uint64_t bits_for_alphabet(std::uint64_t alphabet) {
  if (alphabet == 0) throw InvalidArgument("empty alphabet");
  return alphabet == 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(alphabet - 1));
}

void Transcript::append(const Message& m) {
  if (m.symbol >= m.alphabet)
    throw InvalidArgument("symbol " + std::to_string(m.symbol) + " outside alphabet of size " +
                          std::to_string(m.alphabet));
  messages_.push_back(m);
}

std::uint64_t Transcript::bit_cost() const {
  std::uint64_t s = 0;
  for (const auto& m : messages_) s += bits_for_alphabet(m.alphabet);
  return s;
}

std::vector<Symbol> Transcript::symbols() const {
  std::vector<Symbol> out;
  out.reserve(messages_.size());
  for (const auto& m : messages_) out.push_back(m.symbol);
  return out;
}

Transcript Transcript::prefix(std::size_t len) const {
  Transcript t;
  t.messages_.assign(messages_.begin(),
                     messages_.begin() + static_cast<std::ptrdiff_t>(std::min(len, size())));
  return t;
}

std::vector<std::uint64_t> Transcript::bits_per_player(int players) const {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(players), 0);
  for (const auto& m : messages_)
    if (m.player >= 0 && m.player < players)
      out[static_cast<std::size_t>(m.player)] += bits_for_alphabet(m.alphabet);
  return out;
}

Atom Transcript::atom() const {
  using u128 = unsigned __int128;
  const u128 limit = static_cast<u128>(std::numeric_limits<Atom>::max());
  u128 id = 0;
  for (auto it = messages_.rbegin(); it != messages_.rend(); ++it) {
    id = id * it->alphabet + it->symbol;
    if (id > limit) throw StateSpaceOverflow("transcript id exceeds the int64 range");
  }
  // Radix product must also fit so that distinct lengths stay distinguishable.
  u128 radix = 1;
  for (const auto& m : messages_) {
    radix *= m.alphabet;
    if (radix > limit) throw StateSpaceOverflow("transcript space exceeds the int64 range");
  }
  return static_cast<Atom>(id);
}

nlohmann::json Transcript::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : messages_)
    arr.push_back({{"player", m.player}, {"symbol", m.symbol}, {"alphabet", m.alphabet}});
  nlohmann::json j = {{"messages", arr}, {"bits", bit_cost()}};
  if (output) j["output"] = *output ? 1 : 0;
  return j;
}

Move PlayerBehavior::sample(const Transcript& prefix, PlayerInput input, PlayerState state,
                            Rng& rng) const {
  const auto ms = moves(prefix, input, state);
  if (ms.empty()) throw SpecificationIncomplete("behavior returned no moves");
  double u = uniform01(rng);
  for (const auto& m : ms) {
    if (u < m.prob) return m;
    u -= m.prob;
  }
  for (auto it = ms.rbegin(); it != ms.rend(); ++it)
    if (it->prob > 0) return *it;
  return ms.back();
}

ProtocolSpec::ProtocolSpec(int players, Scheduler scheduler, std::vector<BehaviorPtr> behaviors,
                           OutputRule output, nlohmann::json descriptor)
    : players_(players),
      scheduler_(std::move(scheduler)),
      behaviors_(std::move(behaviors)),
      output_(std::move(output)),
      descriptor_(std::move(descriptor)) {
  if (players_ < 1) throw InvalidArgument("a protocol needs at least one player");
  if (static_cast<int>(behaviors_.size()) != players_)
    throw InvalidArgument("one behavior per player required");
  for (const auto& b : behaviors_)
    if (!b) throw InvalidArgument("null player behavior");
}

const PlayerBehavior& ProtocolSpec::behavior(int player) const {
  return *behavior_ptr(player);
}

BehaviorPtr ProtocolSpec::behavior_ptr(int player) const {
  if (player < 0 || player >= players_) throw InvalidArgument("player index out of range");
  return behaviors_[static_cast<std::size_t>(player)];
}

ProtocolSpec ProtocolSpec::with_behavior(int player, BehaviorPtr behavior, bool clean) const {
  if (player < 0 || player >= players_) throw InvalidArgument("player index out of range");
  ProtocolSpec out = *this;
  out.behaviors_[static_cast<std::size_t>(player)] = std::move(behavior);
  if (clean)
    out.clean_.insert(player);
  else
    out.clean_.erase(player);
  return out;
}

ProtocolSpec ProtocolSpec::with_descriptor(nlohmann::json descriptor) const {
  ProtocolSpec out = *this;
  out.descriptor_ = std::move(descriptor);
  return out;
}

namespace {

void check_inputs(const ProtocolSpec& spec, const std::vector<PlayerInput>& inputs) {
  if (static_cast<int>(inputs.size()) != spec.players())
    throw InvalidArgument("expected one input per player");
}

void check_turn(const ProtocolSpec& spec, const Turn& turn) {
  if (turn.player < 0 || turn.player >= spec.players())
    throw SpecificationIncomplete("scheduler named a nonexistent player");
  if (turn.alphabet == 0) throw SpecificationIncomplete("scheduler produced an empty alphabet");
}

}  // namespace

Transcript run_protocol(const ProtocolSpec& spec, const std::vector<PlayerInput>& inputs,
                        std::uint64_t seed) {
  check_inputs(spec, inputs);
  std::vector<PlayerState> states(inputs.size(), 0);
  Transcript t;
  for (std::size_t step = 0;; ++step) {
    if (step > kMaxTurns) throw SpecificationIncomplete("protocol does not terminate");
    auto turn = spec.next_turn(t);
    if (!turn) break;
    check_turn(spec, *turn);
    const auto p = static_cast<std::size_t>(turn->player);
    Rng rng = counter_rng(seed, p, turn->round);
    Move mv = spec.behavior(turn->player).sample(t, inputs[p], states[p], rng);
    t.append({turn->player, mv.symbol, turn->alphabet});
    states[p] = mv.next_state;
  }
  t.output = spec.output(t);
  return t;
}

std::vector<TranscriptLeaf> enumerate_transcripts(const ProtocolSpec& spec,
                                                  const std::vector<PlayerInput>& inputs,
                                                  std::size_t max_leaves) {
  check_inputs(spec, inputs);
  std::vector<TranscriptLeaf> leaves;
  struct Frame {
    Transcript t;
    std::vector<PlayerState> states;
    double prob;
  };
  std::vector<Frame> stack;
  stack.push_back({Transcript{}, std::vector<PlayerState>(inputs.size(), 0), 1.0});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.t.size() > kMaxTurns) throw SpecificationIncomplete("protocol does not terminate");
    auto turn = spec.next_turn(f.t);
    if (!turn) {
      if (leaves.size() >= max_leaves)
        throw StateSpaceOverflow("transcript space exceeds " + std::to_string(max_leaves) +
                                 " atoms");
      f.t.output = spec.output(f.t);
      leaves.push_back({std::move(f.t), std::move(f.states), f.prob});
      continue;
    }
    check_turn(spec, *turn);
    const auto p = static_cast<std::size_t>(turn->player);
    const auto ms = spec.behavior(turn->player).moves(f.t, inputs[p], f.states[p]);
    for (auto it = ms.rbegin(); it != ms.rend(); ++it) {
      if (!(it->prob > 0.0)) continue;
      Frame g{f.t, f.states, f.prob * it->prob};
      g.t.append({turn->player, it->symbol, turn->alphabet});
      g.states[p] = it->next_state;
      stack.push_back(std::move(g));
      if (stack.size() + leaves.size() > 4 * max_leaves)
        throw StateSpaceOverflow("enumeration frontier too large");
    }
  }
  return leaves;
}

FiniteDistribution transcript_distribution(const ProtocolSpec& spec,
                                           const std::vector<PlayerInput>& inputs,
                                           std::size_t max_atoms) {
  FiniteDistribution::Map m;
  for (const auto& leaf : enumerate_transcripts(spec, inputs, max_atoms))
    m[leaf.transcript.atom()] += leaf.prob;
  return FiniteDistribution::unchecked(std::move(m));
}

double output_probability(const ProtocolSpec& spec, const std::vector<PlayerInput>& inputs,
                          std::size_t max_atoms) {
  double s = 0.0;
  for (const auto& leaf : enumerate_transcripts(spec, inputs, max_atoms))
    if (*leaf.transcript.output) s += leaf.prob;
  return s;
}

// ---------------------------------------------------------------------------
// Tabular protocols

namespace {

class TabularBehavior final : public PlayerBehavior {
 public:
  explicit TabularBehavior(std::shared_ptr<const TabularProtocol> proto) : proto_(std::move(proto)) {}

  std::vector<Move> moves(const Transcript& prefix, PlayerInput input, PlayerState) const override {
    if (input > 1) throw InvalidArgument("tabular protocols take input bits");
    TabularProtocol::Key key{prefix.symbols(), static_cast<int>(input)};
    auto it = proto_->table.find(key);
    if (it == proto_->table.end())
      throw SpecificationIncomplete("no message table at prefix of length " +
                                    std::to_string(prefix.size()) + " for bit " +
                                    std::to_string(input));
    std::vector<Move> out;
    for (const auto& [sym, p] : it->second.probs()) {
      if (sym < 0) throw SpecificationIncomplete("negative message symbol in table");
      out.push_back({static_cast<Symbol>(sym), 0, p});
    }
    return out;
  }

 private:
  std::shared_ptr<const TabularProtocol> proto_;
};

}  // namespace

ProtocolSpec TabularProtocol::to_spec() const {
  auto proto = std::make_shared<const TabularProtocol>(*this);
  auto scheduler = [proto](const Transcript& t) -> std::optional<Turn> {
    if (t.size() >= proto->schedule.size()) return std::nullopt;
    return proto->schedule[t.size()];
  };
  auto output = [proto](const Transcript& t) {
    auto it = proto->outputs.find(t.symbols());
    if (it == proto->outputs.end())
      throw SpecificationIncomplete("no output entry for final transcript");
    return it->second;
  };
  std::vector<BehaviorPtr> behaviors;
  auto b = std::make_shared<TabularBehavior>(proto);
  for (int i = 0; i < players; ++i) behaviors.push_back(b);
  return ProtocolSpec(players, scheduler, behaviors, output, to_json());
}

nlohmann::json TabularProtocol::to_json() const {
  nlohmann::json sched = nlohmann::json::array();
  for (const auto& t : schedule) sched.push_back({t.player, t.alphabet, t.round});
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& [key, dist] : table)
    msgs.push_back({{"prefix", key.prefix}, {"bit", key.bit}, {"dist", disjstream::to_json(dist)}});
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& [tr, v] : outputs) outs.push_back({{"transcript", tr}, {"value", v ? 1 : 0}});
  return {{"protocol", "tabular"},
          {"players", players},
          {"schedule", sched},
          {"messages", msgs},
          {"outputs", outs}};
}

TabularProtocol TabularProtocol::from_json(const nlohmann::json& j) {
  TabularProtocol p;
  p.players = j.at("players").get<int>();
  for (const auto& t : j.at("schedule")) {
    Turn turn{t.at(0).get<int>(), t.at(1).get<std::uint64_t>(),
              t.size() > 2 ? t.at(2).get<std::uint64_t>() : 0};
    p.schedule.push_back(turn);
  }
  for (const auto& m : j.at("messages")) {
    Key key{m.at("prefix").get<std::vector<Symbol>>(), m.at("bit").get<int>()};
    p.table.emplace(std::move(key), distribution_from_json(m.at("dist")));
  }
  for (const auto& o : j.at("outputs"))
    p.outputs[o.at("transcript").get<std::vector<Symbol>>()] = o.at("value").get<int>() != 0;
  return p;
}

TabularProtocol random_tabular_protocol(const RandomTabularOptions& opts, std::uint64_t seed) {
  if (opts.players < 1 || opts.rounds < 1 || opts.max_alphabet < 2 || opts.max_transcripts < 2)
    throw InvalidArgument("random protocol options out of range");
  Rng rng(seed);
  TabularProtocol p;
  p.players = opts.players;
  std::uint64_t space = 1;
  for (int r = 0; r < opts.rounds; ++r) {
    for (int j = 0; j < opts.players; ++j) {
      std::uint64_t a = 2 + uniform_below(rng, opts.max_alphabet - 1);
      while (a >= 2 && space * a > opts.max_transcripts) --a;
      if (a < 2) continue;
      if (r > 0 && uniform_below(rng, 3) == 0) continue;
      space *= a;
      p.schedule.push_back({j, a, static_cast<std::uint64_t>(r)});
    }
  }
  if (p.schedule.empty()) p.schedule.push_back({0, 2, 0});

  auto random_dist = [&](std::uint64_t alphabet) {
    FiniteDistribution::Map w;
    for (std::uint64_t s = 0; s < alphabet; ++s) {
      if (bernoulli(rng, opts.sparsity)) continue;
      w[static_cast<Atom>(s)] = 0.05 + uniform01(rng);
    }
    if (w.empty()) w[static_cast<Atom>(uniform_below(rng, alphabet))] = 1.0;
    return FiniteDistribution::from_weights(w);
  };

  // Walk every prefix of the (fixed-schedule) transcript tree.
  std::vector<std::vector<Symbol>> level{{}};
  for (std::size_t pos = 0; pos < p.schedule.size(); ++pos) {
    const auto a = p.schedule[pos].alphabet;
    std::vector<std::vector<Symbol>> next;
    for (const auto& pre : level) {
      auto d0 = random_dist(a);
      auto d1 = bernoulli(rng, opts.ignore_bit_prob) ? d0 : random_dist(a);
      p.table.emplace(TabularProtocol::Key{pre, 0}, d0);
      p.table.emplace(TabularProtocol::Key{pre, 1}, d1);
      for (Symbol s = 0; s < a; ++s) {
        auto ext = pre;
        ext.push_back(s);
        next.push_back(std::move(ext));
      }
    }
    level = std::move(next);
  }
  for (const auto& tr : level) p.outputs[tr] = bernoulli(rng, 0.5);
  return p;
}

}  // namespace disjstream
