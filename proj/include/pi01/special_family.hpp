#pragma once

// Stage-driven construction of a family of trees T_0, T_1, ... whose path
// classes have no computable member and admit no finite join computing the
// diagonal set D.
//
// Requirement slots come from a registry of functionals: slot e owns the odd
// level 2e+1 (prune any node that agrees with Ψ_e(∅)) and the even levels
// 2e -> 2e+2 (a follower per tuple of incompatible level-2e nodes, put into D
// once Ψ_e on the join of level-(2e+2) extensions converges to 0 there).

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pi01/join.hpp"
#include "pi01/machine.hpp"
#include "pi01/tree.hpp"

namespace pi01 {

struct StageBudget {
  std::size_t tuples_per_stage = 64;
  std::size_t max_height = 12;  // leaves at this length are not extended
  std::size_t max_arity = 0;    // 0 = unbounded
  std::uint64_t evals_per_stage = std::uint64_t{1} << 18;

  friend bool operator==(const StageBudget&, const StageBudget&) = default;
};

struct Functional {
  std::string name;
  Program program;

  friend bool operator==(const Functional&, const Functional&) = default;
};

using Registry = std::vector<Functional>;

struct TupleItem {
  std::size_t tree = 0;
  FinString node;

  friend bool operator==(const TupleItem&, const TupleItem&) = default;
  friend auto operator<=>(const TupleItem& a, const TupleItem& b) {
    if (auto c = a.node <=> b.node; c != 0) return c;
    return a.tree <=> b.tree;
  }
};

/// Mutually incompatible nodes of one even level, ordered by node.
using Tuple = std::vector<TupleItem>;

inline std::string tuple_str(const Tuple& t) {
  std::string out = "<";
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k) out += ",";
    out += "T" + std::to_string(t[k].tree) + ":" + t[k].node.str();
  }
  return out + ">";
}

struct FollowerEntry {
  Tuple tuple;
  Natural follower = 0;
  std::size_t level = 0;
  Stage assigned_at = 0;
  std::optional<Stage> diagonalized_at;
  std::vector<FinString> witness;

  friend bool operator==(const FollowerEntry&, const FollowerEntry&) = default;
};

class FollowerTable {
 public:
  const std::vector<FollowerEntry>& entries() const noexcept { return entries_; }
  std::vector<FollowerEntry>& entries() noexcept { return entries_; }
  Natural next_follower() const noexcept { return next_; }

  const FollowerEntry* find(const Tuple& t) const {
    auto it = lookup_.find(t);
    return it == lookup_.end() ? nullptr : &entries_[it->second];
  }

  /// Assigns the next counter value not in `excluded`.
  template <typename Excluded>
  FollowerEntry& assign(Tuple t, std::size_t level, Stage s, const Excluded& excluded) {
    while (excluded.count(next_)) ++next_;
    lookup_.emplace(t, entries_.size());
    entries_.push_back(FollowerEntry{std::move(t), next_++, level, s, std::nullopt, {}});
    return entries_.back();
  }

  /// Re-inserts a saved entry verbatim.
  void restore(FollowerEntry entry, Natural next) {
    lookup_.emplace(entry.tuple, entries_.size());
    entries_.push_back(std::move(entry));
    next_ = std::max(next_, next);
  }

  friend bool operator==(const FollowerTable& a, const FollowerTable& b) {
    return a.entries_ == b.entries_ && a.next_ == b.next_;
  }

 private:
  std::vector<FollowerEntry> entries_;
  std::map<Tuple, std::size_t> lookup_;
  Natural next_ = 0;
};

namespace action {

struct OddPrune {
  std::size_t e = 0;
  std::size_t tree = 0;
  FinString tau, tau0;
  std::optional<FinString> tau1;
  std::size_t killed = 0;
  friend bool operator==(const OddPrune&, const OddPrune&) = default;
};

struct FollowerAssign {
  Tuple tuple;
  Natural follower = 0;
  std::size_t level = 0;
  friend bool operator==(const FollowerAssign&, const FollowerAssign&) = default;
};

struct DiagonalizeD {
  std::size_t e = 0;
  Tuple tuple;
  std::vector<FinString> extensions;
  Natural follower = 0;
  std::size_t killed = 0;
  friend bool operator==(const DiagonalizeD&, const DiagonalizeD&) = default;
};

struct BudgetExhausted {
  std::string phase;  // "register" or "search"
  std::string detail;
  friend bool operator==(const BudgetExhausted&, const BudgetExhausted&) = default;
};

struct LeafExtend {
  std::size_t tree = 0;
  FinString node;
  friend bool operator==(const LeafExtend&, const LeafExtend&) = default;
};

}  // namespace action

/// Log entry. Within a stage entries are ordered by kind, which is also the
/// order the construction performs them.
struct Action {
  using Body = std::variant<action::OddPrune, action::FollowerAssign, action::DiagonalizeD,
                            action::BudgetExhausted, action::LeafExtend>;
  Stage stage = 0;
  Body body;

  std::size_t kind() const noexcept { return body.index(); }
  friend bool operator==(const Action&, const Action&) = default;
};

inline const char* action_kind_name(std::size_t kind) {
  static const char* names[] = {"OddPrune", "FollowerAssign", "DiagonalizeD", "BudgetExhausted",
                                "LeafExtend"};
  return kind < 5 ? names[kind] : "?";
}

struct RequirementCheck {
  bool satisfied = true;
  std::optional<FinString> witness;     // odd: the node awaiting its prune
  std::vector<FinString> extensions;    // even: the threatening extensions
};

class ConstructionState {
 public:
  ConstructionState() = default;

  /// The state after stage 0: T_0 = {∅}, every other tree unborn.
  ConstructionState(std::size_t tree_count, Registry registry, StageBudget budget = {})
      : registry_(std::move(registry)), budget_(budget), tree_count_(tree_count) {
    if (tree_count_ > 0) {
      trees_.emplace_back(0, 0);
      trees_.back().enumerate(FinString(), 0, "birth");
    }
  }

  const Registry& registry() const noexcept { return registry_; }
  const StageBudget& budget() const noexcept { return budget_; }
  std::size_t tree_count() const noexcept { return tree_count_; }
  Stage stage() const noexcept { return stage_; }
  const std::vector<StagedTree>& trees() const noexcept { return trees_; }
  const StagedTree& tree(std::size_t i) const {
    if (i >= trees_.size()) throw not_found_error("tree " + std::to_string(i) + " is not born");
    return trees_[i];
  }
  /// D as follower -> stage of entry.
  const std::map<Natural, Stage>& diagonal_set() const noexcept { return d_; }
  bool in_d(Natural x, Stage s) const {
    auto it = d_.find(x);
    return it != d_.end() && it->second <= s;
  }
  const FollowerTable& followers() const noexcept { return followers_; }
  const std::vector<Action>& log() const noexcept { return log_; }

  /// Executes the next stage.
  void advance() {
    const Stage s = ++stage_;
    if (s < tree_count_) {
      trees_.emplace_back(s, s);
      trees_.back().enumerate(FinString(), s, "birth");
    }
    for (auto& t : trees_) t.touch(s);

    prune_odd_levels(s);
    register_tuples(s);
    diagonalize(s);
    extend_leaves(s);
  }

  /// Rebuilds a state from saved parts (snapshot loading).
  static ConstructionState restore(Registry registry, StageBudget budget, std::size_t tree_count,
                                   Stage stage, std::vector<StagedTree> trees,
                                   std::map<Natural, Stage> d, FollowerTable followers,
                                   std::vector<Action> log) {
    ConstructionState st;
    st.registry_ = std::move(registry);
    st.budget_ = budget;
    st.tree_count_ = tree_count;
    st.stage_ = stage;
    st.trees_ = std::move(trees);
    st.d_ = std::move(d);
    st.followers_ = std::move(followers);
    st.log_ = std::move(log);
    return st;
  }

  /// Alive nodes of tree i at `stage` on tree level L, length-lex ordered.
  std::vector<FinString> alive_at_level(std::size_t i, std::size_t L, Stage stage) const {
    std::vector<FinString> out;
    for (const auto& [node, rec] : trees_[i].nodes())
      if (rec.present_at(stage) && rec.status_at(stage) == NodeStatus::Alive &&
          node.size() >= L && pi01::level(trees_[i], node, stage) == L)
        out.push_back(node);
    std::sort(out.begin(), out.end(), LengthLexLess{});
    return out;
  }

  /// Alive extensions of σ in tree i at `stage` on tree level L.
  std::vector<FinString> alive_extensions_at_level(std::size_t i, const FinString& sigma,
                                                   std::size_t L, Stage stage) const {
    std::vector<FinString> out;
    auto [first, last] = trees_[i].extensions(sigma);
    for (auto it = first; it != last; ++it)
      if (it->second.present_at(stage) && it->second.status_at(stage) == NodeStatus::Alive &&
          pi01::level(trees_[i], it->first, stage) == L)
        out.push_back(it->first);
    std::sort(out.begin(), out.end(), LengthLexLess{});
    return out;
  }

  /// The least Alive node of T_i at level 2e+1 that is an initial segment of
  /// Ψ_e(∅)[s].
  std::optional<FinString> odd_target(std::size_t e, std::size_t i, Stage s,
                                      const FinString& rho) const {
    const StagedTree& t = trees_[i];
    for (std::size_t k = 0; k <= rho.size(); ++k) {
      FinString p = rho.prefix(k);
      if (t.alive(p, s) && pi01::level(t, p, s) == 2 * e + 1) return p;
    }
    return std::nullopt;
  }

  /// Visits extension combinations for a tuple in odometer order; stops when
  /// `visit` returns true. Returns false if some component has no extension.
  bool for_each_extension_combo(const Tuple& tuple, std::size_t target_level, Stage s,
                                const std::function<bool(const std::vector<FinString>&)>& visit)
      const {
    std::vector<std::vector<FinString>> choices;
    for (const auto& item : tuple) {
      choices.push_back(alive_extensions_at_level(item.tree, item.node, target_level, s));
      if (choices.back().empty()) return false;
    }
    std::vector<std::size_t> pos(tuple.size(), 0);
    std::vector<FinString> combo(tuple.size());
    while (true) {
      for (std::size_t k = 0; k < tuple.size(); ++k) combo[k] = choices[k][pos[k]];
      if (visit(combo)) return true;
      std::size_t k = tuple.size();
      while (k > 0) {
        --k;
        if (++pos[k] < choices[k].size()) break;
        pos[k] = 0;
        if (k == 0) return true;
      }
      if (tuple.empty()) return true;
    }
  }

  friend bool operator==(const ConstructionState& a, const ConstructionState& b) {
    return a.registry_ == b.registry_ && a.budget_ == b.budget_ &&
           a.tree_count_ == b.tree_count_ && a.stage_ == b.stage_ && a.trees_ == b.trees_ &&
           a.d_ == b.d_ && a.followers_ == b.followers_ && a.log_ == b.log_;
  }

 private:
  void log(Stage s, Action::Body body) { log_.push_back(Action{s, std::move(body)}); }

  void prune_odd_levels(Stage s) {
    std::vector<FinString> rho;
    rho.reserve(registry_.size());
    for (const auto& f : registry_) rho.push_back(computable_prefix(f.program, s));

    for (auto& t : trees_) {
      for (std::size_t e = 0; e < registry_.size(); ++e) {
        if (rho[e].size() < 2 * e + 1) continue;
        auto tau = odd_target(e, t.index(), s, rho[e]);
        if (!tau) continue;
        FinString tau0 = immediate_predecessor(t, *tau, s);
        std::optional<FinString> tau1;
        for (const auto& leaf : leaves(t, s, true))
          if (tau0.is_proper_prefix_of(leaf) && !leaf.compatible_with(*tau)) {
            tau1 = leaf;
            break;
          }
        const std::string cause =
            "odd e=" + std::to_string(e) + " tree=" + std::to_string(t.index());
        const std::size_t killed = declare_terminal_cone(t, tau0, *tau, s, cause);
        log(s, action::OddPrune{e, t.index(), *tau, tau0, tau1, killed});
      }
    }
  }

  void register_tuples(Stage s) {
    std::size_t room = budget_.tuples_per_stage;
    bool truncated = false;
    for (std::size_t e = 0; e < registry_.size() && !truncated; ++e) {
      const std::size_t L = 2 * e;
      std::vector<TupleItem> items;
      for (const auto& t : trees_)
        for (auto& node : alive_at_level(t.index(), L, s)) items.push_back({t.index(), node});
      if (items.empty()) continue;
      std::sort(items.begin(), items.end());

      std::size_t distinct = 0;
      for (std::size_t k = 0; k < items.size(); ++k)
        if (k == 0 || items[k].node != items[k - 1].node) ++distinct;
      std::size_t arity_cap = budget_.max_arity ? std::min(budget_.max_arity, distinct) : distinct;

      Tuple current;
      // Depth-first over strictly increasing nodes; returns false to stop.
      std::function<bool(std::size_t, std::size_t)> extend = [&](std::size_t from,
                                                                 std::size_t arity) -> bool {
        if (current.size() == arity) {
          if (followers_.find(current)) return true;
          if (room == 0) {
            truncated = true;
            return false;
          }
          auto& entry = followers_.assign(current, L, s, d_);
          log(s, action::FollowerAssign{entry.tuple, entry.follower, L});
          --room;
          return true;
        }
        for (std::size_t k = from; k < items.size(); ++k) {
          if (!current.empty() && !(current.back().node < items[k].node)) continue;
          current.push_back(items[k]);
          const bool go_on = extend(k + 1, arity);
          current.pop_back();
          if (!go_on) return false;
        }
        return true;
      };
      for (std::size_t arity = 1; arity <= arity_cap && !truncated; ++arity) extend(0, arity);
    }
    if (truncated)
      pending_notes_.push_back(action::BudgetExhausted{
          "register", "tuples_per_stage=" + std::to_string(budget_.tuples_per_stage)});
  }

  void diagonalize(Stage s) {
    std::uint64_t evals = 0;
    bool exhausted = false;
    for (std::size_t idx = 0; idx < followers_.entries().size() && !exhausted; ++idx) {
      // Entries are looked up by index: killing nodes never adds entries.
      const FollowerEntry& entry = followers_.entries()[idx];
      if (entry.assigned_at >= s || entry.diagonalized_at || d_.count(entry.follower)) continue;
      if (entry.follower > s) continue;
      bool components_alive = true;
      for (const auto& item : entry.tuple)
        components_alive = components_alive && trees_[item.tree].alive(item.node, s);
      if (!components_alive) continue;

      const std::size_t e = entry.level / 2;
      const Program& program = registry_[e].program;
      std::optional<std::vector<FinString>> witness;
      for_each_extension_combo(entry.tuple, entry.level + 2, s, [&](const auto& combo) {
        if (evals >= budget_.evals_per_stage) {
          exhausted = true;
          return true;
        }
        ++evals;
        if (program.run(finite_join(combo), entry.follower, s).halted_with(0)) {
          witness = combo;
          return true;
        }
        return false;
      });
      if (!witness) continue;

      const Natural x = entry.follower;
      d_.emplace(x, s);
      const std::string cause = "even e=" + std::to_string(e) + " x=" + std::to_string(x);
      std::size_t killed = 0;
      for (std::size_t k = 0; k < entry.tuple.size(); ++k)
        killed += declare_terminal_except(trees_[entry.tuple[k].tree], entry.tuple[k].node,
                                          (*witness)[k], s, cause);
      auto& mutable_entry = followers_.entries()[idx];
      mutable_entry.diagonalized_at = s;
      mutable_entry.witness = *witness;
      log(s, action::DiagonalizeD{e, mutable_entry.tuple, *witness, x, killed});
    }
    if (exhausted)
      pending_notes_.push_back(action::BudgetExhausted{
          "search", "evals_per_stage=" + std::to_string(budget_.evals_per_stage)});
    for (auto& note : pending_notes_) log(s, std::move(note));
    pending_notes_.clear();
  }

  void extend_leaves(Stage s) {
    for (auto& t : trees_) {
      for (const auto& leaf : leaves(t, s, true)) {
        if (leaf.size() >= budget_.max_height) continue;
        t.enumerate(leaf.child(Sym::Zero), s, "extend");
        t.enumerate(leaf.child(Sym::One), s, "extend");
        log(s, action::LeafExtend{t.index(), leaf});
      }
    }
  }

  Registry registry_;
  StageBudget budget_;
  std::size_t tree_count_ = 0;
  Stage stage_ = 0;
  std::vector<StagedTree> trees_;
  std::map<Natural, Stage> d_;
  FollowerTable followers_;
  std::vector<Action> log_;
  std::vector<action::BudgetExhausted> pending_notes_;
};

inline ConstructionState run_stage(ConstructionState state) {
  state.advance();
  return state;
}

inline ConstructionState run(ConstructionState state, std::size_t stages) {
  for (std::size_t k = 0; k < stages; ++k) state.advance();
  return state;
}

/// Satisfied iff no Alive level-(2e+1) node of T_i is an initial segment of
/// Ψ_e(∅)[s]; otherwise Pending with that node.
inline RequirementCheck check_requirement_odd(const ConstructionState& state, std::size_t e,
                                              std::size_t i, Stage s) {
  const StagedTree& t = state.tree(i);
  if (e >= state.registry().size()) throw not_found_error("no registry slot " + std::to_string(e));
  if (s < t.birth_stage()) throw not_found_error("tree " + std::to_string(i) + " unborn at stage " +
                                                 std::to_string(s));
  const FinString rho = computable_prefix(state.registry()[e].program, s);
  RequirementCheck out;
  if (auto tau = state.odd_target(e, i, s, rho)) {
    out.satisfied = false;
    out.witness = tau;
  }
  return out;
}

/// Satisfied iff the follower x of `tuple` is in D with its witnessing
/// extensions still Alive and Ψ_e on them still 0 at x, or no Alive
/// extensions at the next even level make Ψ_e converge to 0 at x by stage s.
inline RequirementCheck check_requirement_even(const ConstructionState& state, std::size_t e,
                                               const Tuple& tuple, Stage s) {
  const FollowerEntry* entry = state.followers().find(tuple);
  if (!entry) throw not_found_error("tuple " + tuple_str(tuple) + " has no follower");
  if (e >= state.registry().size()) throw not_found_error("no registry slot " + std::to_string(e));
  const Program& program = state.registry()[e].program;
  const Natural x = entry->follower;
  const bool x_in_d = state.in_d(x, s);

  RequirementCheck out;
  if (x_in_d && entry->diagonalized_at && *entry->diagonalized_at <= s) {
    bool alive = true;
    for (std::size_t k = 0; k < tuple.size(); ++k)
      alive = alive && state.tree(tuple[k].tree).alive(entry->witness[k], s);
    if (alive && program.run(finite_join(entry->witness), x, s).halted_with(0)) return out;
  }
  std::optional<std::vector<FinString>> threat;
  state.for_each_extension_combo(tuple, entry->level + 2, s, [&](const auto& combo) {
    if (program.run(finite_join(combo), x, s).halted_with(0)) {
      threat = combo;
      return true;
    }
    return false;
  });
  if (threat) {
    out.satisfied = false;
    out.extensions = *threat;
  }
  return out;
}

}  // namespace pi01
