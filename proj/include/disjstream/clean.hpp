#pragma once

#include <vector>

#include "disjstream/protocol.hpp"

namespace disjstream {

// Equivalent protocol in which `player` decides to look at its bit with a
// prefix-dependent probability, sends input-independent messages until then,
// and afterwards sends messages whose supports for bit 0 and bit 1 are
// disjoint. State 1 of the rewritten player means "observed". The original
// behavior of `player` must be stateless and take input bits.
ProtocolSpec clean_simulate(const ProtocolSpec& spec, int player);

// Pr[player ends in the observed state] on `inputs` (default: all zero).
double observation_probability(const ProtocolSpec& clean_spec, int player);
double observation_probability(const ProtocolSpec& clean_spec, int player,
                               const std::vector<PlayerInput>& inputs);

// Pr[some player of `group` observes] on `inputs`.
double observation_probability_any(const ProtocolSpec& clean_spec, const std::vector<int>& group,
                                   const std::vector<PlayerInput>& inputs);

}  // namespace disjstream
