#include <algorithm>

#include "disjstream/errors.hpp"
#include "disjstream/sketches.hpp"

namespace disjstream {

MisraGriesSummary::MisraGriesSummary(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidArgument("Misra-Gries needs at least one counter");
  counters_.reserve(capacity + 1);
}

void MisraGriesSummary::update(std::uint64_t item) {
  ++processed_;
  auto it = counters_.find(item);
  if (it != counters_.end()) {
    ++it->second;
    return;
  }
  if (counters_.size() < capacity_) {
    counters_.emplace(item, 1);
    return;
  }
  // Decrement everything, the incoming item included. Each round removes
  // S+1 units, so the total work stays linear in the stream length.
  ++rounds_;
  for (auto jt = counters_.begin(); jt != counters_.end();) {
    if (--jt->second == 0)
      jt = counters_.erase(jt);
    else
      ++jt;
  }
}

std::uint64_t MisraGriesSummary::estimate(std::uint64_t item) const {
  auto it = counters_.find(item);
  return it == counters_.end() ? 0 : it->second;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> MisraGriesSummary::counters() const {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out(counters_.begin(), counters_.end());
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json MisraGriesSummary::to_json() const {
  return {{"capacity", capacity_},
          {"processed", processed_},
          {"rounds", rounds_},
          {"counters", counters()}};
}

MisraGriesSummary MisraGriesSummary::from_json(const nlohmann::json& j) {
  MisraGriesSummary s(j.at("capacity").get<std::size_t>());
  s.processed_ = j.at("processed").get<std::uint64_t>();
  s.rounds_ = j.at("rounds").get<std::uint64_t>();
  for (const auto& kv : j.at("counters")) {
    const auto item = kv.at(0).get<std::uint64_t>();
    const auto count = kv.at(1).get<std::uint64_t>();
    if (count == 0) throw InvalidArgument("stored counters must be positive");
    s.counters_[item] = count;
  }
  if (s.counters_.size() > s.capacity_) throw InvalidArgument("more counters than capacity");
  return s;
}

}  // namespace disjstream
