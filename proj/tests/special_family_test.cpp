#include <gtest/gtest.h>

#include "pi01/checks.hpp"
#include "pi01/programs.hpp"
#include "pi01/special_family.hpp"

using namespace pi01;

namespace {

Registry diverging() { return {{"div", programs::diverge()}, {"div2", programs::diverge()}}; }

// Slot 1 computes 0^ω, so it owns level 3.
Registry with_constant_zero() {
  return {{"div", programs::diverge()}, {"c0", programs::constant_zero()}};
}

Registry with_zero_on_followers() {
  return {{"div", programs::diverge()}, {"z", programs::zero_after_query()}};
}

const action::OddPrune* find_prune(const ConstructionState& st, std::size_t e, std::size_t tree,
                                   Stage* at = nullptr) {
  for (const auto& a : st.log())
    if (const auto* p = std::get_if<action::OddPrune>(&a.body); p && p->e == e && p->tree == tree) {
      if (at) *at = a.stage;
      return p;
    }
  return nullptr;
}

}  // namespace

TEST(Construction, StageZeroHoldsOnlyTheRoot) {
  ConstructionState st(4, diverging());
  ASSERT_EQ(st.trees().size(), 1u);
  EXPECT_EQ(st.tree(0).size(), 1u);
  EXPECT_TRUE(st.tree(0).contains(FinString(), 0));
  EXPECT_THROW(st.tree(1), not_found_error);
}

TEST(Construction, RunZeroStagesIsIdentity) {
  const ConstructionState st(3, with_constant_zero());
  EXPECT_EQ(run(st, 0), st);
}

TEST(Construction, RunComposes) {
  const ConstructionState st(3, with_zero_on_followers());
  EXPECT_EQ(run(run(st, 7), 5), run(st, 12));
}

TEST(Construction, QuietStagesDoubleTheLeaves) {
  ConstructionState st(2, diverging());
  for (Stage s = 1; s <= 10; ++s) {
    st.advance();
    EXPECT_EQ(leaves(st.tree(0), s, true).size(), std::size_t{1} << s);
  }
  for (const auto& a : st.log()) {
    EXPECT_FALSE(std::holds_alternative<action::OddPrune>(a.body));
    EXPECT_FALSE(std::holds_alternative<action::DiagonalizeD>(a.body));
  }
}

TEST(Construction, TreesAreBornOnSchedule) {
  const auto st = run(ConstructionState(4, diverging()), 6);
  ASSERT_EQ(st.trees().size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(st.tree(i).birth_stage(), i);
  EXPECT_TRUE(check_dovetailing(st).empty());
}

TEST(Construction, ConstantZeroIsPrunedOnItsOddLevel) {
  const auto st = run(ConstructionState(1, with_constant_zero()), 12);
  Stage at = 0;
  const auto* p = find_prune(st, 1, 0, &at);
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->tau.text(), "000");
  EXPECT_EQ(p->tau0.text(), "00");
  ASSERT_TRUE(p->tau1.has_value());
  EXPECT_EQ(p->tau1->text().substr(0, 3), "001");
  EXPECT_EQ(st.tree(0).find(FinString::binary("000"))->status_at(at), NodeStatus::Terminal);
  EXPECT_TRUE(check_prune_soundness(st).empty());
}

TEST(Requirements, OddPendingThenSatisfied) {
  const auto st = run(ConstructionState(1, with_constant_zero()), 12);
  Stage at = 0;
  ASSERT_NE(find_prune(st, 1, 0, &at), nullptr);
  const auto before = check_requirement_odd(st, 1, 0, at - 1);
  EXPECT_FALSE(before.satisfied);
  EXPECT_EQ(before.witness->text(), "000");
  for (Stage s = at; s <= 12; ++s) EXPECT_TRUE(check_requirement_odd(st, 1, 0, s).satisfied) << s;
  for (Stage s = 0; s <= 12; ++s) EXPECT_TRUE(check_requirement_odd(st, 0, 0, s).satisfied);
  EXPECT_TRUE(check_odd_progress(st).empty());
}

TEST(Requirements, EvenSatisfiedOnceFollowerEntersD) {
  const auto st = run(ConstructionState(2, with_zero_on_followers()), 20);
  ASSERT_FALSE(st.diagonal_set().empty());
  std::size_t checked = 0;
  for (const auto& e : st.followers().entries()) {
    if (!e.diagonalized_at) continue;
    ++checked;
    for (Stage s = *e.diagonalized_at; s <= 20; ++s)
      EXPECT_TRUE(check_requirement_even(st, e.level / 2, e.tuple, s).satisfied);
  }
  EXPECT_GT(checked, 0u);
  EXPECT_TRUE(check_d_soundness(st).empty());
}

TEST(Requirements, DivergingFunctionalNeverThreatens) {
  const auto st = run(ConstructionState(2, diverging()), 8);
  ASSERT_FALSE(st.followers().entries().empty());
  EXPECT_TRUE(st.diagonal_set().empty());
  for (const auto& e : st.followers().entries())
    for (Stage s = e.assigned_at; s <= 8; ++s)
      EXPECT_TRUE(check_requirement_even(st, e.level / 2, e.tuple, s).satisfied);
}

TEST(Requirements, UnregisteredTupleIsAnError) {
  const auto st = run(ConstructionState(1, diverging()), 2);
  EXPECT_THROW(check_requirement_even(st, 0, Tuple{{0, FinString::binary("0101")}}, 2),
               not_found_error);
}

TEST(Diagonalization, NonWitnessExtensionsAreTerminal) {
  const auto st = run(ConstructionState(2, with_zero_on_followers()), 20);
  std::size_t seen = 0;
  for (const auto& a : st.log()) {
    const auto* d = std::get_if<action::DiagonalizeD>(&a.body);
    if (!d) continue;
    ++seen;
    for (std::size_t k = 0; k < d->tuple.size(); ++k) {
      const auto& t = st.tree(d->tuple[k].tree);
      auto [first, last] = t.extensions(d->tuple[k].node);
      for (auto it = first; it != last; ++it) {
        if (!it->second.present_at(a.stage) || it->first.compatible_with(d->extensions[k])) continue;
        EXPECT_EQ(it->second.status_at(a.stage), NodeStatus::Terminal) << it->first.str();
      }
    }
  }
  EXPECT_GT(seen, 0u);
}

TEST(Followers, DistinctAndFresh) {
  const auto st = run(ConstructionState(3, with_zero_on_followers()), 25);
  std::set<Natural> xs;
  for (const auto& e : st.followers().entries()) {
    EXPECT_TRUE(xs.insert(e.follower).second);
    EXPECT_FALSE(st.in_d(e.follower, e.assigned_at));
  }
}

TEST(Budget, ExhaustionIsLoggedNotFatal) {
  StageBudget tight;
  tight.tuples_per_stage = 1;
  const auto st = run(ConstructionState(3, diverging(), tight), 6);
  bool noted = false;
  for (const auto& a : st.log())
    if (const auto* b = std::get_if<action::BudgetExhausted>(&a.body)) noted |= b->phase == "register";
  EXPECT_TRUE(noted);
  EXPECT_TRUE(check_construction(st).empty());
}

TEST(Invariants, FullScanOnMixedRegistry) {
  Registry r{{"c0", programs::constant_zero()}, {"z", programs::zero_after_query()},
             {"id", programs::identity_oracle()}};
  StageBudget budget;
  budget.max_height = 2 * r.size() + 3;
  const auto st = run(ConstructionState(3, r, budget), 40);
  for (const auto& v : check_construction(st)) ADD_FAILURE() << v.str();
}
