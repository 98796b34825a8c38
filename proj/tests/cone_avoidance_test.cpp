#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pi01/cone_avoidance.hpp"
#include "pi01/programs.hpp"

using namespace pi01;

namespace {

FinString b(const std::string& s) { return FinString::binary(s); }

// Every member extends 01 or is a prefix of it.
StagedTree above_01(std::size_t depth) {
  StagedTree t(0, 0);
  t.enumerate(FinString(), 0);
  t.enumerate(b("0"), 0);
  t.enumerate(b("01"), 0);
  for (const auto& s : oracle::all_strings(depth - 2)) t.enumerate(b("01" + s), 0);
  return t;
}

}  // namespace

TEST(IncompatiblePair, FullBinaryTree) {
  const auto p = least_incompatible_extendibles(full_binary_tree(6), 6, 0);
  EXPECT_EQ(p.sigma.text(), "0");
  EXPECT_EQ(p.tau.text(), "1");
  EXPECT_EQ(p.n, 0u);
}

TEST(IncompatiblePair, StemAboveZeroOne) {
  const auto t = above_01(7);
  const auto p = least_incompatible_extendibles(t, 7, 0);
  // brute force: least length-lex pair of incompatible members extending 01
  std::optional<std::pair<std::string, std::string>> want;
  const auto all = oracle::all_strings(7);
  for (std::size_t a = 0; a < all.size() && !want; ++a)
    for (std::size_t c = a + 1; c < all.size() && !want; ++c) {
      const auto& x = all[a];
      const auto& y = all[c];
      if (!t.contains(b(x), 0) || !t.contains(b(y), 0)) continue;
      std::size_t k = 0;
      while (k < x.size() && k < y.size() && x[k] == y[k]) ++k;
      if (k < x.size() && k < y.size()) want = std::make_pair(x, y);
    }
  ASSERT_TRUE(want);
  EXPECT_EQ(p.sigma.text(), want->first);
  EXPECT_EQ(p.tau.text(), want->second);
  EXPECT_EQ(p.n, 2u);
  EXPECT_FALSE(p.sigma.compatible_with(p.tau));
  EXPECT_TRUE(extendible_to_depth(t, p.sigma, 7, 0));
  EXPECT_TRUE(extendible_to_depth(t, p.tau, 7, 0));
}

TEST(IncompatiblePair, SinglePathHasNone) {
  StagedTree t(0, 0);
  t.enumerate(FinString(), 0);
  t.enumerate(b("1"), 0);
  t.enumerate(b("11"), 0);
  EXPECT_THROW(least_incompatible_extendibles(t, 2, 0), not_found_error);
}

TEST(LowerCone, ConstantZeroSelectsTheOneSide) {
  const auto t = full_binary_tree(8);
  const auto r = lower_cone_subtree(t, {b("0101"), b("11")}, programs::constant_zero(), 100, 8, 0);
  ASSERT_EQ(r.kind, SubtreeResult::Kind::Compatible);
  EXPECT_EQ(r.root->text(), "1");
  EXPECT_EQ(*r.answer->value, 0u);
  for (const auto& s : compatible_restriction(t, *r.root, 8, 0)) EXPECT_TRUE(s.compatible_with(*r.root));
}

TEST(LowerCone, DivergenceLeavesTreeUnrestricted) {
  const auto r = lower_cone_subtree(full_binary_tree(4), {b("01")}, programs::diverge(), 100, 4, 0);
  EXPECT_EQ(r.kind, SubtreeResult::Kind::Unrestricted);
  EXPECT_FALSE(r.answer->converged());
  EXPECT_EQ(r.answer->budget, 100u);
}

TEST(LowerCone, ConvergedAnswerStableUnderLargerBudget) {
  const auto t = full_binary_tree(5);
  const std::vector<FinString> rows{b("1011"), b("0110")};
  std::optional<FinString> first;
  for (Natural budget = 0; budget < 40; ++budget) {
    const auto r = lower_cone_subtree(t, rows, programs::identity_oracle(), budget, 5, 0);
    if (r.kind == SubtreeResult::Kind::Compatible) {
      if (!first) first = r.root;
      EXPECT_EQ(*r.root, *first);
    } else {
      EXPECT_FALSE(first.has_value()) << "Converged flipped back to Unknown at " << budget;
    }
  }
  EXPECT_TRUE(first.has_value());
}

TEST(UpperCone, UnOfDivergingProgramIsEverything) {
  const auto t = full_binary_tree(5);
  const auto u = compute_U_n(t, programs::diverge(), b("0110"), 2, 5, 200, 0);
  EXPECT_EQ(u.size(), 63u);
}

TEST(UpperCone, UnOfExactProgramIsEmpty) {
  const auto x = b("0110");
  const auto t = full_binary_tree(5);
  for (Natural n = 0; n < x.size(); ++n)
    EXPECT_TRUE(compute_U_n(t, programs::x_lookup(x), x, n, 5, 200, 0).empty());
}

TEST(UpperCone, UnOfFirstBitMatchesBruteForce) {
  const auto x = b("10");
  const auto t = full_binary_tree(6);
  for (Natural n = 0; n < x.size(); ++n) {
    std::vector<FinString> want;
    for (const auto& s : oracle::all_strings(6)) {
      const std::string join = oracle::constant_join(s);
      if (join.empty() || join[0] - '0' != x.bit(n)) want.push_back(b(s));
    }
    EXPECT_EQ(compute_U_n(t, programs::first_bit(), x, n, 6, 200, 0), want);
  }
  EXPECT_THROW(compute_U_n(t, programs::first_bit(), x, 2, 6, 200, 0), workbench_error);
}

TEST(UpperCone, DivergingSelectsNZero) {
  const auto t = full_binary_tree(4);
  const auto r = upper_cone_subtree(t, programs::diverge(), b("101"), 4, 100, 0);
  ASSERT_EQ(r.kind, SubtreeResult::Kind::UnSet);
  EXPECT_EQ(*r.n, 0u);
  EXPECT_EQ(r.members, tree_members(t, 4, 0));
  EXPECT_EQ(r.running_members, r.members.size());
}

TEST(UpperCone, OracleFreeComputationReportsCaseOne) {
  const auto x = b("1101");
  const auto r = upper_cone_subtree(full_binary_tree(4), programs::x_lookup(x), x, 4, 200, 0);
  ASSERT_EQ(r.kind, SubtreeResult::Kind::CaseOne);
  EXPECT_EQ(r.case_one->n, 0u);
  EXPECT_EQ(r.case_one->m, 0u);
  EXPECT_EQ(r.case_one->k, 1u);
}

TEST(UpperCone, SelectedMembersAvoidX) {
  const auto x = b("01");
  const auto t = full_binary_tree(5);
  const auto r = upper_cone_subtree(t, programs::first_bit(), x, 5, 200, 0);
  ASSERT_EQ(r.kind, SubtreeResult::Kind::UnSet);
  for (const auto& s : r.members)
    EXPECT_FALSE(programs::first_bit()
                     .run(constant_join(s).determined_prefix(), *r.n, 200)
                     .halted_with(static_cast<Natural>(x.bit(*r.n))));
}
