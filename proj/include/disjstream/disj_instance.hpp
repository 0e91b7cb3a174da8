#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace disjstream {

enum class Label { kNo = 0, kYes = 1 };

std::string to_string(Label l);
Label label_from_string(const std::string& s);

// k players' bit-vectors over the universe [n].
class DisjInstance {
 public:
  DisjInstance() = default;
  DisjInstance(std::size_t n, std::size_t k, std::size_t l);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t l() const { return l_; }

  bool bit(std::size_t player, std::size_t i) const { return bits_[player * n_ + i] != 0; }
  void set_bit(std::size_t player, std::size_t i, bool v);

  std::vector<std::size_t> row(std::size_t player) const;
  std::size_t row_size(std::size_t player) const;
  // Row as a bitmask; requires n <= 64.
  std::uint64_t row_mask(std::size_t player) const;
  std::vector<std::uint64_t> row_masks() const;
  std::size_t column_weight(std::size_t i) const;

  // Intended label and popular column as set by the generator.
  Label label = Label::kNo;
  std::optional<std::size_t> star;

  nlohmann::json to_json() const;
  static DisjInstance from_json(const nlohmann::json& j);

  friend bool operator==(const DisjInstance&, const DisjInstance&) = default;

 private:
  std::size_t n_ = 0, k_ = 0, l_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct PromiseReport {
  std::optional<Label> label;
  std::optional<std::size_t> star;
  std::vector<std::size_t> violating_columns;
  std::string reason;
  bool ok() const { return label.has_value(); }
};

// Recomputes column sums: NO if all are <= 1, YES if exactly one equals l and
// the rest are <= 1; otherwise names the offending columns.
PromiseReport verify_promise(const DisjInstance& inst);

struct HardDistSample {
  DisjInstance instance;
  std::vector<std::size_t> owners;  // D_i
  std::size_t special = 0;          // I
  int z = 0;                        // Z
  std::vector<std::size_t> owner_set;  // S (sorted), only when z = 1
};

// The hard distribution: each coordinate gets a uniform owner who holds it
// with probability 1/2; if z = 1 a uniform coordinate is overwritten by a
// uniform l-subset of players.
HardDistSample sample_eta(std::size_t n, std::size_t k, std::size_t l, int z, std::uint64_t seed);

// Instances that pack as many elements into the players' sets as the promise
// allows.
DisjInstance adversarial_no(std::size_t n, std::size_t k, std::size_t l, std::uint64_t seed);
DisjInstance adversarial_yes(std::size_t n, std::size_t k, std::size_t l, std::uint64_t seed);

// Default multiplicity ceil(c*k).
std::size_t default_l(std::size_t k, double c = 0.5);

}  // namespace disjstream
