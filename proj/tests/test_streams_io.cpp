#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "disjstream/errors.hpp"
#include "disjstream/stream.hpp"
#include "disjstream/test_streams.hpp"

using namespace disjstream;

namespace {

bool strict_on_every_prefix(const NamedStream& s) {
  std::vector<std::int64_t> x(s.universe, 0);
  for (const auto& u : s.updates) {
    if (u.index >= s.universe) return false;
    if ((x[u.index] += u.sign) < 0) return false;
  }
  return true;
}

}  // namespace

TEST(StreamIo, TextRoundTrip) {
  const UpdateStream up{{3, 1}, {0, -1}, {3, -1}, {7, 1}};
  StreamHeader h{8, 4, 2, 2.0, Label::kYes};
  std::stringstream ss;
  write_stream_text(ss, h, up);
  StreamHeader back;
  EXPECT_EQ(read_stream_text(ss, &back), up);
  EXPECT_EQ(back.n, 8u);
  EXPECT_EQ(back.k, 4u);
  EXPECT_EQ(back.l, 2u);
  EXPECT_DOUBLE_EQ(back.p, 2.0);
  EXPECT_EQ(back.label, Label::kYes);
}

TEST(StreamIo, BinaryRoundTrip) {
  const UpdateStream up{{70000, 1}, {0, -1}, {4294967295u, 1}};
  std::stringstream ss;
  write_stream_binary(ss, up);
  EXPECT_EQ(ss.str().size(), 15u);
  EXPECT_EQ(read_stream_binary(ss), up);
}

TEST(StreamIo, RejectsMalformedInput) {
  std::stringstream bad_sign("4 1 1 1 NO\n2 +2\n");
  EXPECT_THROW(read_stream_text(bad_sign), InvalidArgument);
  std::stringstream out_of_range("4 1 1 1 NO\n9 +1\n");
  EXPECT_THROW(read_stream_text(out_of_range), InvalidArgument);
  std::stringstream truncated(std::string("\x01\x00\x00", 3));
  EXPECT_THROW(read_stream_binary(truncated), InvalidArgument);
}

TEST(StreamIo, Replay) {
  EXPECT_EQ(replay(4, {{1, 1}, {1, 1}, {2, -1}}), (FrequencyVector{0, 2, -1, 0}));
  EXPECT_THROW(replay(2, {{2, 1}}), InvalidArgument);
}

TEST(TestStreams, RandomStrictStreamsAreStrict) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto s = random_strict_stream(1000, seed);
    EXPECT_LE(s.updates.size(), 1000u);
    EXPECT_TRUE(strict_on_every_prefix(s)) << seed;
  }
}

TEST(TestStreams, InsertionStreamsOnlyInsert) {
  const auto s = random_insertion_stream(500, 4);
  for (const auto& u : s.updates) EXPECT_EQ(u.sign, 1);
}

TEST(TestStreams, AdversarialStreamsAreStrictAndBounded) {
  for (std::uint64_t L : {1000u, 10000u}) {
    const auto streams = adversarial_strict_streams(L, 0.25, 635, 1);
    EXPECT_EQ(streams.size(), 10u);
    std::set<std::string> names;
    for (const auto& s : streams) {
      EXPECT_LE(s.updates.size(), L) << s.name;
      EXPECT_TRUE(strict_on_every_prefix(s)) << s.name;
      EXPECT_TRUE(names.insert(s.name).second);
    }
  }
}

TEST(TestStreams, MgErasureShape) {
  const auto s = mg_erasure_stream(3, 5, 7);
  EXPECT_EQ(s.updates.size(), 4u * 5 + 7);
  const auto x = replay(s.universe, s.updates);
  EXPECT_EQ(x[4 - 1], 5);
  EXPECT_EQ(*std::max_element(x.begin(), x.end()), 7);
}
