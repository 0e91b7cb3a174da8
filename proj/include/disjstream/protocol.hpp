#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "disjstream/distributions.hpp"
#include "disjstream/rng.hpp"

namespace disjstream {

using Symbol = std::uint64_t;
using PlayerInput = std::uint64_t;
using PlayerState = std::uint32_t;

// ceil(log2(alphabet)); a one-letter alphabet costs nothing.
std::uint64_t bits_for_alphabet(std::uint64_t alphabet);

struct Message {
  int player = 0;
  Symbol symbol = 0;
  std::uint64_t alphabet = 1;
  friend bool operator==(const Message&, const Message&) = default;
};

class Transcript {
 public:
  void append(const Message& m);
  void pop_back() { messages_.pop_back(); }
  const std::vector<Message>& messages() const { return messages_; }
  std::size_t size() const { return messages_.size(); }
  bool empty() const { return messages_.empty(); }
  const Message& operator[](std::size_t i) const { return messages_[i]; }

  std::uint64_t bit_cost() const;
  std::vector<Symbol> symbols() const;
  Transcript prefix(std::size_t len) const;
  // Bits written by each of `players` players.
  std::vector<std::uint64_t> bits_per_player(int players) const;

  // Injective id: s1 + a1*(s2 + a2*(...)). Throws StateSpaceOverflow when the
  // alphabet product leaves the int64 range.
  Atom atom() const;

  std::optional<bool> output;

  nlohmann::json to_json() const;
  friend bool operator==(const Transcript&, const Transcript&) = default;

 private:
  std::vector<Message> messages_;
};

struct Turn {
  int player = 0;
  std::uint64_t alphabet = 1;
  // Randomness key; messages sharing (player, round) replay the same draws.
  std::uint64_t round = 0;
};

struct Move {
  Symbol symbol = 0;
  PlayerState next_state = 0;
  double prob = 0.0;
};

class PlayerBehavior {
 public:
  virtual ~PlayerBehavior() = default;
  // Exact distribution of (symbol, next state) at this turn.
  virtual std::vector<Move> moves(const Transcript& prefix, PlayerInput input,
                                  PlayerState state) const = 0;
  virtual Move sample(const Transcript& prefix, PlayerInput input, PlayerState state,
                      Rng& rng) const;
  virtual bool stateless() const { return true; }
};

using BehaviorPtr = std::shared_ptr<const PlayerBehavior>;

class ProtocolSpec {
 public:
  using Scheduler = std::function<std::optional<Turn>(const Transcript&)>;
  using OutputRule = std::function<bool(const Transcript&)>;

  ProtocolSpec(int players, Scheduler scheduler, std::vector<BehaviorPtr> behaviors,
               OutputRule output, nlohmann::json descriptor = nlohmann::json::object());

  int players() const { return players_; }
  std::optional<Turn> next_turn(const Transcript& prefix) const { return scheduler_(prefix); }
  const PlayerBehavior& behavior(int player) const;
  BehaviorPtr behavior_ptr(int player) const;
  bool output(const Transcript& t) const { return output_(t); }
  const nlohmann::json& descriptor() const { return descriptor_; }

  // Players whose state 1 means "has looked at its input".
  bool is_clean_for(int player) const { return clean_.count(player) > 0; }
  const std::set<int>& clean_players() const { return clean_; }

  ProtocolSpec with_behavior(int player, BehaviorPtr behavior, bool clean) const;
  ProtocolSpec with_descriptor(nlohmann::json descriptor) const;

 private:
  int players_;
  Scheduler scheduler_;
  std::vector<BehaviorPtr> behaviors_;
  OutputRule output_;
  nlohmann::json descriptor_;
  std::set<int> clean_;
};

inline constexpr std::size_t kDefaultMaxAtoms = std::size_t{1} << 20;
inline constexpr std::size_t kMaxTurns = std::size_t{1} << 20;

Transcript run_protocol(const ProtocolSpec& spec, const std::vector<PlayerInput>& inputs,
                        std::uint64_t seed);

struct TranscriptLeaf {
  Transcript transcript;
  std::vector<PlayerState> states;
  double prob = 0.0;
};

// Every complete transcript reachable with positive probability.
std::vector<TranscriptLeaf> enumerate_transcripts(const ProtocolSpec& spec,
                                                  const std::vector<PlayerInput>& inputs,
                                                  std::size_t max_leaves = kDefaultMaxAtoms);

FiniteDistribution transcript_distribution(const ProtocolSpec& spec,
                                           const std::vector<PlayerInput>& inputs,
                                           std::size_t max_atoms = kDefaultMaxAtoms);

// Pr[output = 1] by enumeration.
double output_probability(const ProtocolSpec& spec, const std::vector<PlayerInput>& inputs,
                          std::size_t max_atoms = kDefaultMaxAtoms);

// Fixed speaking schedule with explicit per-(prefix, bit) message tables.
struct TabularProtocol {
  struct Key {
    std::vector<Symbol> prefix;
    int bit = 0;
    auto operator<=>(const Key&) const = default;
  };

  int players = 0;
  std::vector<Turn> schedule;
  std::map<Key, FiniteDistribution> table;
  std::map<std::vector<Symbol>, bool> outputs;

  ProtocolSpec to_spec() const;
  nlohmann::json to_json() const;
  static TabularProtocol from_json(const nlohmann::json& j);
};

struct RandomTabularOptions {
  int players = 2;
  int rounds = 2;
  std::uint64_t max_alphabet = 3;
  std::uint64_t max_transcripts = 64;
  // Chance that a player's two bit-tables coincide at a prefix.
  double ignore_bit_prob = 0.25;
  // Chance that a table entry is forced to zero mass.
  double sparsity = 0.3;
};

TabularProtocol random_tabular_protocol(const RandomTabularOptions& opts, std::uint64_t seed);

// Rebuilds any protocol produced by this library from its descriptor.
ProtocolSpec protocol_from_json(const nlohmann::json& j);

}  // namespace disjstream
