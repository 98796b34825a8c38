#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pi01/chain.hpp"
#include "pi01/checks.hpp"
#include "pi01/cone_avoidance.hpp"

using namespace pi01;

namespace {

using Table = std::vector<std::pair<Stage, Natural>>;

Table random_table(std::mt19937_64& rng, std::size_t count, Natural max_x, Stage max_stage) {
  std::set<Natural> used;
  Table out;
  while (out.size() < count) {
    const Natural x = rng() % max_x;
    if (used.insert(x).second) out.emplace_back(rng() % max_stage, x);
  }
  return out;
}

}  // namespace

TEST(EnumFn, HandRunExample) {
  const auto a = ReEnumeration::from_table({{1, 3}, {2, 1}});
  EXPECT_EQ(enum_fn(a, 2, 2), 2u);
  EXPECT_EQ(enum_fn(a, 2, 1), 0u);
  EXPECT_EQ(enum_fn(a, 2, 0), 0u);
  EXPECT_THROW(enum_fn(a, 2, 3), workbench_error);
}

TEST(EnumFn, DuplicateEntriesRejected) {
  EXPECT_THROW(ReEnumeration::from_table({{1, 3}, {4, 3}}), workbench_error);
}

TEST(EnumFn, MatchesSetComparisonAndIsMonotone) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Table table = random_table(rng, 15, 40, 100);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> raw(table.begin(), table.end());
    const auto a = ReEnumeration::from_table(table);
    for (Stage s = 0; s <= 100; s += 7) {
      const auto f = enum_fn_approx(a, s);
      for (Natural n = 0; n <= s; ++n) {
        EXPECT_EQ(f(n), oracle::enum_fn(raw, s, n));
        EXPECT_LE(f(n), s);
        if (s + 1 <= 100) {
          EXPECT_LE(f(n), enum_fn(a, s + 1, n));
        }
      }
      EXPECT_EQ(f(0), 0u);
    }
  }
}

TEST(EnumFn, ProgramEnumeration) {
  // x enters once "halt r1" has run, i.e. at stage max(x, 1)
  const auto a = ReEnumeration::from_program(Program::assemble("halt r1"));
  EXPECT_EQ(a.at(5, 100), (std::set<Natural>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(a.at(0, 100), std::set<Natural>{});
  EXPECT_EQ(enum_fn(a, 5, 4), 3u);
}

TEST(Copy, TranslatesClass) {
  const ClosureTree full(share(full_binary_tree(3)), ClosureTree::Cutoff::Horizon);
  const auto c = copy(FinString::binary("01"), full, 1);
  std::vector<std::string> got;
  for (const auto& s : c) got.push_back(s.text());
  EXPECT_EQ(got, (std::vector<std::string>{"01", "010", "011"}));
  EXPECT_EQ(copy(FinString(), full, 2), full.members(2));
}

TEST(BaseClass, AfterTwoStages) {
  const auto t = base_computable_class(2);
  std::vector<std::string> got;
  for (const auto& s : alive_nodes(t, 2)) got.push_back(s.text());
  EXPECT_EQ(got, (std::vector<std::string>{"", "0", "1", "00", "01", "11"}));
}

TEST(BaseClass, ShapeToDepthTwelve) {
  const auto t = base_computable_class(12);
  for (const auto& s : oracle::all_strings(12)) {
    const bool zeros_then_ones = s.find("10") == std::string::npos;
    EXPECT_EQ(t.contains(FinString::binary(s), 12), zeros_then_ones) << s;
  }
  EXPECT_TRUE(check_base_class_shape(t, 12).empty());
}

TEST(PiStrings, Blocks) {
  EnumFnApprox f{3, {0, 1, 1, 2}};
  EXPECT_EQ(pi_strings(f, 0).text(), "");
  EXPECT_EQ(pi_strings(f, 1).text(), "1#");
  EXPECT_EQ(pi_strings(f, 3).text(), "1#11#11#");
  EXPECT_THROW(pi_strings(f, 5), workbench_error);
}

TEST(DecodePath, KnownAndMalformed) {
  EXPECT_EQ(decode_path(FinString::ternary("1#11#")), (std::vector<Stage>{0, 1}));
  EXPECT_TRUE(decode_path(FinString()).empty());
  try {
    decode_path(FinString::ternary("1#101#"));
    FAIL();
  } catch (const decode_error& e) {
    EXPECT_EQ(e.position(), 3u);
  }
  EXPECT_THROW(decode_path(FinString::ternary("1#11")), decode_error);
  EXPECT_THROW(decode_path(FinString::ternary("##")), decode_error);
  EXPECT_EQ(decode_blocks(FinString::ternary("1#11")), (std::vector<Stage>{0}));
}

TEST(DecodePath, RoundTripOnRandomTables) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    EnumFnApprox f{20, {}};
    for (int n = 0; n <= 20; ++n) f.values.push_back(rng() % 21);
    const std::size_t blocks = rng() % 21;
    const auto got = decode_path(pi_strings(f, blocks));
    EXPECT_EQ(got, std::vector<Stage>(f.values.begin(), f.values.begin() + blocks));
  }
}

TEST(BuildQ, StageZero) {
  const auto q = build_Q(ReEnumeration(), base_class_closure(5), 0);
  EXPECT_EQ(q.upsilon.size(), 1u);
  EXPECT_TRUE(q.markers.empty());
}

TEST(BuildQ, EmptySetCodesAllZeros) {
  const Stage S = 40;
  const auto q = build_Q(ReEnumeration(), base_class_closure(S), S);
  const auto blocks = decode_blocks(longest_pi_prefix(q));
  ASSERT_GE(blocks.size(), 10u);
  for (auto v : blocks) EXPECT_EQ(v, 0u);
  EXPECT_TRUE(longest_pi_prefix(q).text().starts_with("1#1#1#"));
  EXPECT_FALSE(q.markers.empty());
  for (const auto& v : check_marker_soundness(q)) ADD_FAILURE() << v.str();
  for (const auto& v : check_graft_soundness(q)) ADD_FAILURE() << v.str();
}

TEST(BuildQ, SomeStringDecodesEachPrefixOfF) {
  const Stage S = 60;
  const auto a = ReEnumeration::from_table({{2, 0}, {5, 2}, {3, 4}, {8, 1}});
  const auto q = build_Q(a, base_class_closure(S), S);
  const auto f = enum_fn_approx(a, S);
  const auto got = decode_blocks(longest_pi_prefix(q));
  ASSERT_GE(got.size(), 6u);
  for (std::size_t n = 0; n < got.size(); ++n) EXPECT_EQ(got[n], f(n)) << n;
  EXPECT_TRUE(check_decode(q, 6).empty());
  EXPECT_TRUE(check_graft_soundness(q).empty());
}

TEST(Chain, SingleLevelEqualsBuildQ) {
  const Stage S = 25;
  const auto c = iterate_chain({ReEnumeration()}, S);
  ASSERT_EQ(c.levels.size(), 1u);
  const auto q = build_Q(ReEnumeration(), base_class_closure(S), S);
  EXPECT_EQ(c.levels[0].upsilon, q.upsilon);
  EXPECT_EQ(c.levels[0].markers, q.markers);
}

TEST(Chain, SecondLevelCarriesFirst) {
  const Stage S = 24;
  const auto c = iterate_chain({ReEnumeration(), ReEnumeration::from_table({{3, 1}})}, S);
  ASSERT_EQ(c.levels.size(), 2u);
  EXPECT_TRUE(check_embedding(c.levels[1], c.levels[1].lambda, 8).empty());
  EXPECT_TRUE(check_graft_soundness(c.levels[1]).empty());
  EXPECT_TRUE(check_decode(c.levels[1], 3).empty());
}

TEST(Chain, UnionTagsLevels) {
  const auto c = iterate_chain({ReEnumeration(), ReEnumeration()}, 10);
  EXPECT_TRUE(c.union_tree.contains(FinString::ternary("1"), 10));
  EXPECT_TRUE(c.union_tree.contains(FinString::ternary("01"), 10));
  EXPECT_TRUE(c.union_tree.contains(FinString::ternary("11"), 10));  // level 1, node "1"
  for (const auto& [s, rec] : c.union_tree.nodes())
    EXPECT_TRUE(s.text().starts_with("1") || s.text().starts_with("01") || s.text() == "0" ||
                s.empty())
        << s.str();
  EXPECT_TRUE(check_tree_structure(c.union_tree).empty());
}
