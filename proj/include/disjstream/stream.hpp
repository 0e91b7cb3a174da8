#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "disjstream/disj_instance.hpp"

namespace disjstream {

using FrequencyVector = std::vector<std::int64_t>;

struct StreamUpdate {
  std::uint32_t index = 0;
  std::int8_t sign = 1;
  friend bool operator==(const StreamUpdate&, const StreamUpdate&) = default;
};

using UpdateStream = std::vector<StreamUpdate>;

FrequencyVector replay(std::size_t universe, const UpdateStream& updates);

// Header fields of the text format "n k l p label".
struct StreamHeader {
  std::size_t n = 0;  // universe size
  std::size_t k = 0;
  std::size_t l = 0;
  double p = 0.0;
  Label label = Label::kNo;
};

void write_stream_text(std::ostream& os, const StreamHeader& h, const UpdateStream& updates);
UpdateStream read_stream_text(std::istream& is, StreamHeader* header = nullptr);

// Little-endian u32 index followed by i8 sign per update; no header.
void write_stream_binary(std::ostream& os, const UpdateStream& updates);
UpdateStream read_stream_binary(std::istream& is);

}  // namespace disjstream
