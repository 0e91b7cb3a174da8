#pragma once

#include <cstdint>
#include <string>

#include "disjstream/protocol.hpp"

namespace disjstream {

// How a publishing player writes the set T of still-unclaimed elements it
// owns. With u unclaimed elements:
//   kSubset          one message over 2^u (+1 collision letter)
//   kSizeCombination size over u+1 (+1 collision letter), then the rank of T
//                    among the C(u,|T|) subsets of that size
//   kAdaptive        kSubset when u < kAdaptiveSubsetLimit, else kSizeCombination
enum class PublishEncoding { kSubset, kSizeCombination, kAdaptive };

inline constexpr std::uint64_t kAdaptiveSubsetLimit = 5;

std::string to_string(PublishEncoding e);
PublishEncoding publish_encoding_from_string(const std::string& s);

// Players 0..k-2 speak in order. Each picks every owned element with
// probability eps; picking an element someone already published is a
// collision, which ends the protocol with YES. Otherwise it publishes its
// picked unclaimed elements. The last player only reports a collision bit.
// Output YES iff a collision was reported. Inputs are row bitmasks, n <= 64.
// l only validates the instance family; the protocol itself ignores it.
ProtocolSpec epsilon_publish_protocol(std::size_t n, std::size_t k, std::size_t l, double eps,
                                      PublishEncoding encoding = PublishEncoding::kAdaptive);

// The eps = 1 case: zero-error.
ProtocolSpec deterministic_disj_protocol(std::size_t n, std::size_t k,
                                         PublishEncoding encoding = PublishEncoding::kAdaptive);

// Pr[YES is missed] on a YES instance whose popular element has l owners:
// fewer than two owners pick it.
double epsilon_publish_failure_probability(std::size_t l, double eps);

// Classic promise disjointness (an element in all sets vs pairwise disjoint).
// Each player in turn says whether |S_j| <= ceil(n/k); the first that does
// posts its set (size, then rank) and another player answers whether it
// intersects the posted set. Inputs outside the promise get an unspecified
// answer.
ProtocolSpec pigeonhole_promise_protocol(std::size_t n, std::size_t k);

// Ranks of subsets: colex rank of `subset` (bits of `universe`) among the
// |subset|-subsets of `universe`, and its inverse.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r);
std::uint64_t combination_rank(std::uint64_t universe, std::uint64_t subset);
std::uint64_t combination_unrank(std::uint64_t universe, std::uint64_t size, std::uint64_t rank);

}  // namespace disjstream
