#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "pi01/strings.hpp"

using namespace pi01;

TEST(FinString, EmptyStringSpellings) {
  EXPECT_TRUE(FinString::binary("").empty());
  EXPECT_TRUE(FinString::binary("ε").empty());
  EXPECT_EQ(FinString().str(), "ε");
}

TEST(FinString, HashOnlyInTernary) {
  EXPECT_THROW(FinString::binary("0#"), alphabet_error);
  EXPECT_NO_THROW(FinString::ternary("0#1"));
  EXPECT_EQ(FinString::parse("1#").alphabet(), Alphabet::Ternary);
  EXPECT_EQ(FinString::parse("10").alphabet(), Alphabet::Binary);
  EXPECT_THROW(FinString::binary("2"), alphabet_error);
}

TEST(FinString, PrefixRelations) {
  const auto a = FinString::binary("01");
  const auto b = FinString::binary("0110");
  EXPECT_TRUE(a.is_prefix_of(b));
  EXPECT_TRUE(a.is_proper_prefix_of(b));
  EXPECT_TRUE(b.is_prefix_of(b));
  EXPECT_FALSE(b.is_proper_prefix_of(b));
  EXPECT_TRUE(FinString().is_prefix_of(a));
  EXPECT_EQ(FinString::binary("0110").first_disagreement(FinString::binary("0100")), 2u);
  EXPECT_FALSE(a.first_disagreement(b).has_value());
  EXPECT_TRUE(compatible(a, b));
  EXPECT_FALSE(compatible(FinString::binary("00"), FinString::binary("01")));
}

TEST(FinString, IncompatibilityMatchesDisagreementScan) {
  const auto all = oracle::all_strings(5);
  for (const auto& x : all)
    for (const auto& y : all) {
      bool differ = false;
      for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) differ |= x[i] != y[i];
      EXPECT_EQ(FinString::binary(x).compatible_with(FinString::binary(y)), !differ) << x << " " << y;
    }
}

TEST(FinString, PrefixAndSuffix) {
  const auto s = FinString::ternary("1#0");
  EXPECT_EQ(s.prefix(2).text(), "1#");
  EXPECT_EQ(s.prefix(10).text(), "1#0");
  EXPECT_EQ(s.suffix_from(2).text(), "0");
  EXPECT_TRUE(s.suffix_from(3).empty());
}

TEST(FinString, ConcatRespectsAlphabets) {
  EXPECT_EQ(concat(FinString::ternary("1#"), FinString::binary("01")).text(), "1#01");
  EXPECT_THROW(concat(FinString::binary("1"), FinString::ternary("#")), alphabet_error);
}

TEST(FinString, BitRejectsHash) {
  EXPECT_EQ(FinString::binary("10").bit(0), 1);
  EXPECT_THROW(FinString::ternary("#").bit(0), alphabet_error);
}

TEST(FinString, EqualityIgnoresAlphabetTag) {
  EXPECT_EQ(FinString::binary("01"), FinString::ternary("01"));
}

TEST(LengthLex, ShorterFirstThenSymbolOrder) {
  std::vector<FinString> v{FinString::ternary("#"), FinString::binary("10"), FinString::binary("1"),
                           FinString(), FinString::binary("0"), FinString::ternary("0#")};
  std::sort(v.begin(), v.end(), LengthLexLess{});
  std::vector<std::string> got;
  for (const auto& s : v) got.push_back(s.text());
  EXPECT_EQ(got, (std::vector<std::string>{"", "0", "1", "#", "0#", "10"}));
}

TEST(Pairing, MatchesDiagonalWalk) {
  const auto table = oracle::pairing_table(5000);
  for (std::uint64_t code = 0; code < table.size(); ++code) {
    const auto [i, j] = table[code];
    EXPECT_EQ(pair(i, j), code);
    EXPECT_EQ(unpair(code), std::make_pair(i, j));
  }
}

TEST(Pairing, KnownValues) {
  EXPECT_EQ(pair(0, 0), 0u);
  EXPECT_EQ(pair(1, 0), 1u);
  EXPECT_EQ(pair(0, 1), 2u);
  EXPECT_EQ(pair(2, 0), 3u);
}

TEST(Pairing, LargeRoundTripAndOverflow) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 2000; ++k) {
    const std::uint64_t i = rng() >> 33, j = rng() >> 33;
    EXPECT_EQ(unpair(pair(i, j)), std::make_pair(i, j));
  }
  EXPECT_THROW(pair(UINT64_MAX, 1), std::overflow_error);
}
