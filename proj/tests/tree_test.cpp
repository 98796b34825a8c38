#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pi01/checks.hpp"
#include "pi01/programs.hpp"
#include "pi01/special_family.hpp"
#include "pi01/tree.hpp"

using namespace pi01;

namespace {

FinString b(const char* s) { return FinString::binary(s); }

StagedTree chain_tree() {
  StagedTree t(0, 0);
  t.enumerate(FinString(), 0);
  t.enumerate(b("01"), 1);
  t.enumerate(b("0110"), 2);
  return t;
}

ConstructionState sample_run(Stage stages) {
  Registry r{{"c0", programs::constant_zero()}, {"z", programs::zero_after_query()}};
  return run(ConstructionState(3, r), stages);
}

}  // namespace

TEST(Leaves, RootOnlyAndChildren) {
  StagedTree t(0, 0);
  t.enumerate(FinString(), 0);
  EXPECT_EQ(leaves(t, 0, false), std::vector<FinString>{FinString()});
  t.enumerate(b("0"), 1);
  t.enumerate(b("1"), 1);
  EXPECT_EQ(leaves(t, 1, false), (std::vector<FinString>{b("0"), b("1")}));
  // the snapshot at stage 0 still sees only the root
  EXPECT_EQ(leaves(t, 0, false), std::vector<FinString>{FinString()});
}

TEST(Leaves, BeforeBirthIsEmpty) {
  StagedTree t(3, 3);
  t.enumerate(FinString(), 3);
  EXPECT_TRUE(leaves(t, 2, false).empty());
}

TEST(Leaves, PairwiseIncompatibleOnConstructionRun) {
  const auto st = sample_run(5);
  for (const auto& t : st.trees()) {
    const auto ls = leaves(t, 5, false);
    for (std::size_t a = 0; a < ls.size(); ++a)
      for (std::size_t c = a + 1; c < ls.size(); ++c)
        EXPECT_FALSE(ls[a].compatible_with(ls[c])) << ls[a].str() << " " << ls[c].str();
  }
}

TEST(ImmediatePredecessor, FollowsEnumeratedChain) {
  const auto t = chain_tree();
  EXPECT_EQ(immediate_predecessor(t, b("0110"), 2), b("01"));
  EXPECT_EQ(immediate_predecessor(t, b("01"), 2), FinString());
  EXPECT_THROW(immediate_predecessor(t, FinString(), 2), no_predecessor_error);
  EXPECT_THROW(immediate_predecessor(t, b("0"), 2), not_found_error);
  EXPECT_EQ(level(t, b("0110"), 2), 2u);
}

TEST(ImmediatePredecessor, StageLeafParentIsPreviousLeaf) {
  const auto st = sample_run(8);
  for (const auto& t : st.trees())
    for (Stage s = t.birth_stage() + 1; s <= 8; ++s) {
      const auto prev = leaves(t, s - 1, false);
      for (const auto& l : leaves(t, s, true)) {
        if (t.find(l)->enumerated_at != s) continue;
        const auto p = immediate_predecessor(t, l, s);
        EXPECT_NE(std::find(prev.begin(), prev.end(), p), prev.end()) << l.str();
      }
    }
}

TEST(DeclareTerminal, ConeKeepsIncompatibleSide) {
  StagedTree t(0, 0);
  t.enumerate(FinString(), 0);
  t.enumerate(b("0"), 1);
  t.enumerate(b("00"), 2);
  t.enumerate(b("01"), 2);
  EXPECT_EQ(declare_terminal_cone(t, b("0"), b("00"), 3), 1u);
  EXPECT_EQ(t.find(b("00"))->status_at(3), NodeStatus::Terminal);
  EXPECT_TRUE(t.alive(b("01"), 3));
  EXPECT_TRUE(t.alive(b("00"), 2));  // earlier snapshots are unchanged
  EXPECT_EQ(declare_terminal_cone(t, b("0"), b("00"), 4), 0u);
  EXPECT_THROW(declare_terminal_cone(t, b("1"), std::nullopt, 4), not_found_error);
}

TEST(DeclareTerminal, TerminalNodesCannotBeExtended) {
  StagedTree t(0, 0);
  t.enumerate(FinString(), 0);
  t.enumerate(b("0"), 1);
  declare_terminal_cone(t, FinString(), std::nullopt, 2);
  EXPECT_THROW(t.enumerate(b("00"), 3), tree_error);
  EXPECT_NO_THROW(t.enumerate(b("1"), 3));
}

TEST(DeclareTerminal, ExceptKeepsOneLine) {
  StagedTree t(0, 0);
  t.enumerate(FinString(), 0);
  for (const char* s : {"0", "1", "00", "01", "10", "11"}) t.enumerate(b(s), 1);
  EXPECT_EQ(declare_terminal_except(t, FinString(), b("01"), 2), 4u);
  EXPECT_TRUE(t.alive(b("0"), 2));
  EXPECT_TRUE(t.alive(b("01"), 2));
  EXPECT_FALSE(t.alive(b("00"), 2));
  EXPECT_FALSE(t.alive(b("1"), 2));
}

TEST(Extendible, SelfWitnessAndDeadSubtree) {
  StagedTree t(0, 0);
  t.enumerate(FinString(), 0);
  t.enumerate(b("0"), 1);
  t.enumerate(b("1"), 1);
  EXPECT_TRUE(extendible_to_depth(t, b("0"), 1, 1));
  declare_terminal_cone(t, FinString(), b("0"), 2);
  EXPECT_FALSE(extendible_to_depth(t, b("0"), 1, 2));
  EXPECT_TRUE(extendible_to_depth(t, FinString(), 1, 2));
}

TEST(Extendible, RootOfConstructionReachesDepthTen) {
  const auto st = sample_run(20);
  EXPECT_TRUE(extendible_to_depth(st.tree(0), FinString(), 10, 20));
}

TEST(Closure, RootAndSelfMembership) {
  auto t = std::make_shared<StagedTree>(0, 0);
  t->enumerate(FinString(), 0);
  t->enumerate(b("1"), 1);
  t->enumerate(b("11"), 5);  // too late for its own length
  ClosureTree c(t);
  EXPECT_TRUE(c.contains(FinString()));
  EXPECT_TRUE(c.contains(b("1")));
  EXPECT_FALSE(c.contains(b("11")));
  EXPECT_FALSE(c.contains(b("0")));
  ClosureTree h(t, ClosureTree::Cutoff::Horizon);
  EXPECT_TRUE(h.contains(b("11")));
}

TEST(Closure, DownwardClosedOnConstructionRun) {
  const auto st = sample_run(14);
  for (const auto& t : st.trees()) {
    ClosureTree c(std::make_shared<const StagedTree>(t));
    for (const auto& x : oracle::all_strings(12)) {
      if (!c.contains(FinString::binary(x))) continue;
      for (std::size_t k = 0; k < x.size(); ++k)
        EXPECT_TRUE(c.contains(FinString::binary(x.substr(0, k)))) << x;
    }
    EXPECT_TRUE(check_closure_soundness(c, 12).empty());
  }
}

TEST(TreeChecks, MonotoneEnumerationAndAbsorption) {
  const auto st = sample_run(30);
  for (const auto& t : st.trees()) {
    for (const auto& [s, rec] : t.nodes())
      for (Stage k = rec.enumerated_at; k <= 30; ++k) {
        ASSERT_TRUE(t.contains(s, k));
        if (rec.status_at(k) == NodeStatus::Terminal) {
          for (Stage later = k; later <= 30; ++later)
            ASSERT_EQ(rec.status_at(later), NodeStatus::Terminal);
        }
      }
    EXPECT_TRUE(check_tree_structure(t).empty());
  }
}
