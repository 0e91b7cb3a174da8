#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include "disjstream/errors.hpp"
#include "disjstream/stream.hpp"

namespace disjstream {

FrequencyVector replay(std::size_t universe, const UpdateStream& updates) {
  FrequencyVector f(universe, 0);
  for (const auto& u : updates) {
    if (u.index >= universe) throw InvalidArgument("update index outside the universe");
    f[u.index] += u.sign;
  }
  return f;
}

void write_stream_text(std::ostream& os, const StreamHeader& h, const UpdateStream& updates) {
  os << h.n << ' ' << h.k << ' ' << h.l << ' ' << h.p << ' ' << to_string(h.label) << '\n';
  for (const auto& u : updates) os << u.index << (u.sign > 0 ? " +1\n" : " -1\n");
}

UpdateStream read_stream_text(std::istream& is, StreamHeader* header) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("stream file is empty");
  StreamHeader h;
  {
    std::istringstream hs(line);
    std::string label;
    if (!(hs >> h.n >> h.k >> h.l >> h.p >> label))
      throw InvalidArgument("malformed stream header: '" + line + "'");
    h.label = label_from_string(label);
  }
  UpdateStream out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long idx = -1;
    std::string sign;
    if (!(ls >> idx >> sign) || idx < 0 || static_cast<std::size_t>(idx) >= h.n ||
        (sign != "+1" && sign != "-1"))
      throw InvalidArgument("malformed update on line " + std::to_string(lineno));
    out.push_back({static_cast<std::uint32_t>(idx), static_cast<std::int8_t>(sign == "+1" ? 1 : -1)});
  }
  if (header) *header = h;
  return out;
}

void write_stream_binary(std::ostream& os, const UpdateStream& updates) {
  for (const auto& u : updates) {
    std::array<char, 5> buf{};
    for (int b = 0; b < 4; ++b) buf[static_cast<std::size_t>(b)] = static_cast<char>((u.index >> (8 * b)) & 0xff);
    buf[4] = static_cast<char>(u.sign);
    os.write(buf.data(), 5);
  }
}

UpdateStream read_stream_binary(std::istream& is) {
  UpdateStream out;
  std::array<char, 5> buf{};
  while (is.read(buf.data(), 5)) {
    std::uint32_t idx = 0;
    for (int b = 0; b < 4; ++b)
      idx |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[static_cast<std::size_t>(b)])) << (8 * b);
    const auto sign = static_cast<std::int8_t>(buf[4]);
    if (sign != 1 && sign != -1) throw InvalidArgument("binary stream has a sign other than +-1");
    out.push_back({idx, sign});
  }
  if (is.gcount() != 0) throw InvalidArgument("binary stream has a truncated record");
  return out;
}

}  // namespace disjstream
