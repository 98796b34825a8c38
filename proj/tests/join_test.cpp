#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pi01/join.hpp"

using namespace pi01;

namespace {
FinString b(const std::string& s) { return FinString::binary(s); }
}  // namespace

TEST(FiniteJoin, Interleaves) {
  EXPECT_EQ(finite_join({b("00"), b("11")}).text(), "0101");
  EXPECT_EQ(finite_join({b("01"), b("10"), b("11")}).text(), "011101");
  EXPECT_EQ(finite_join({b("0110")}).text(), "0110");
}

TEST(FiniteJoin, TruncatesToShortestComponent) {
  EXPECT_EQ(finite_join({b("000"), b("1")}).text(), "01");
  EXPECT_TRUE(finite_join({b(""), b("11")}).empty());
}

TEST(FiniteJoin, Errors) {
  EXPECT_THROW(finite_join(std::span<const FinString>()), join_error);
  EXPECT_THROW(finite_join({FinString::ternary("#")}), alphabet_error);
  EXPECT_THROW(finite_join_decode(b("01"), 0), join_error);
}

TEST(FiniteJoin, MatchesDefinitionOnSmallCases) {
  const auto all = oracle::all_strings(3);
  for (const auto& x : all)
    for (const auto& y : all)
      for (const auto& z : all)
        EXPECT_EQ(finite_join({b(x), b(y), b(z)}).text(), oracle::interleaved_join({x, y, z}));
}

TEST(FiniteJoin, DecodeRoundTrip) {
  const auto j = finite_join({b("0110"), b("1100"), b("1010")});
  const auto parts = finite_join_decode(j, 3);
  EXPECT_EQ(parts[0].text(), "0110");
  EXPECT_EQ(parts[1].text(), "1100");
  EXPECT_EQ(parts[2].text(), "1010");
}

TEST(InfiniteJoin, BitsFollowPairing) {
  const auto o = join_oracle({b("01"), b("1")});
  // position <j,x>: <0,0>=0, <1,0>=1, <0,1>=2, <2,0>=3
  EXPECT_EQ(o.bit(0), 0);
  EXPECT_EQ(o.bit(1), 1);
  EXPECT_EQ(o.bit(2), 1);
  EXPECT_EQ(o.bit(3), std::nullopt);
  EXPECT_EQ(o.determined_length(), 3u);
  EXPECT_EQ(o.determined_prefix().text(), "011");
}

TEST(InfiniteJoin, UndeterminedPositionIsNamed) {
  const auto o = join_oracle({b("1")});
  try {
    o.string(3);
    FAIL();
  } catch (const undetermined_position_error& e) {
    EXPECT_EQ(e.position(), 1u);
  }
}

TEST(InfiniteJoin, ConstantJoinMatchesReference) {
  for (const auto& s : oracle::all_strings(7))
    EXPECT_EQ(constant_join(b(s)).determined_prefix().text(), oracle::constant_join(s)) << s;
  EXPECT_TRUE(constant_join(FinString()).determined_prefix().empty());
}
