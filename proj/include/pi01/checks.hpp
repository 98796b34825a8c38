#pragma once

// Invariant checks over finished runs. Each returns the violations found;
// an empty list means the invariant holds.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pi01/chain.hpp"
#include "pi01/special_family.hpp"
#include "pi01/tree.hpp"

namespace pi01 {

struct Violation {
  std::string module;
  std::string invariant;
  Stage stage = 0;
  std::string witness;
  std::string detail;

  std::string str() const {
    return module + "/" + invariant + " at stage " + std::to_string(stage) + ", witness " +
           witness + (detail.empty() ? "" : ": " + detail);
  }
};

using Violations = std::vector<Violation>;

inline void append(Violations& into, Violations more) {
  into.insert(into.end(), std::make_move_iterator(more.begin()),
              std::make_move_iterator(more.end()));
}

// ---- trees ----------------------------------------------------------------

/// Birth convention, record sanity, and terminal absorption (no node
/// enumerated above a node that was already Terminal).
inline Violations check_tree_structure(const StagedTree& t) {
  Violations out;
  const std::string mod = "trees";
  const std::string tag = "T" + std::to_string(t.index()) + ":";
  const NodeRecord* root = t.find(FinString());
  if (!root || root->enumerated_at != t.birth_stage())
    out.push_back({mod, "root-at-birth", t.birth_stage(), tag + "ε",
                   "root must be enumerated exactly at the birth stage"});
  for (const auto& [s, rec] : t.nodes()) {
    if (rec.enumerated_at < t.birth_stage())
      out.push_back({mod, "dovetailing", rec.enumerated_at, tag + s.str(),
                     "enumerated before birth stage " + std::to_string(t.birth_stage())});
    if (rec.terminal_since && *rec.terminal_since < rec.enumerated_at)
      out.push_back({mod, "terminal-after-enumeration", *rec.terminal_since, tag + s.str(), ""});
    for (std::size_t k = 0; k < s.size(); ++k) {
      const NodeRecord* p = t.find(s.prefix(k));
      if (!p) continue;
      if (p->enumerated_at > rec.enumerated_at)
        out.push_back({mod, "prefix-order", rec.enumerated_at, tag + s.str(),
                       "prefix " + s.prefix(k).str() + " enumerated later"});
      if (p->terminal_since && *p->terminal_since < rec.enumerated_at)
        out.push_back({mod, "terminal-absorption", rec.enumerated_at, tag + s.str(),
                       "extends " + s.prefix(k).str() + ", terminal since stage " +
                           std::to_string(*p->terminal_since)});
    }
  }
  return out;
}

/// At `stage`: every non-leaf node with an Alive leaf above it has two
/// incompatible Alive leaves above it.
inline Violations check_leaf_pair_liveness(const StagedTree& t, Stage stage) {
  Violations out;
  if (stage < t.birth_stage()) return out;
  // Distinct leaves are never comparable, so "two incompatible Alive leaves
  // above σ" means "at least two Alive leaves above σ".
  std::map<FinString, std::size_t> above;
  for (const auto& l : leaves(t, stage, true))
    for (std::size_t k = 0; k < l.size(); ++k) {
      FinString p = l.prefix(k);
      if (t.contains(p, stage)) ++above[p];
    }
  for (const auto& [s, count] : above)
    if (count < 2)
      out.push_back({"trees", "leaf-pair-liveness", stage,
                     "T" + std::to_string(t.index()) + ":" + s.str(),
                     "one Alive leaf above a non-leaf node"});
  return out;
}

/// Downward closure of Λ up to `max_length`, and every prefix of a node
/// enumerated by its cutoff is a member.
inline Violations check_closure_soundness(const ClosureTree& c, std::size_t max_length) {
  Violations out;
  for (const auto& s : c.members(max_length))
    for (std::size_t k = 0; k < s.size(); ++k)
      if (!c.contains(s.prefix(k)))
        out.push_back({"trees", "closure-downward", c.cutoff_stage(s.size()), s.str(),
                       "prefix " + s.prefix(k).str() + " missing"});
  for (const auto& [s, rec] : c.source().nodes()) {
    if (s.size() > max_length || rec.enumerated_at > c.cutoff_stage(s.size())) continue;
    for (std::size_t k = 0; k <= s.size(); ++k)
      if (!c.contains(s.prefix(k)))
        out.push_back({"trees", "closure-soundness", rec.enumerated_at, s.str(),
                       "prefix " + s.prefix(k).str() + " not a member"});
  }
  return out;
}

// ---- construction ---------------------------------------------------------

inline Violations check_dovetailing(const ConstructionState& st) {
  Violations out;
  const std::size_t expected = std::min<std::size_t>(st.tree_count(), st.stage() + 1);
  if (st.trees().size() != expected)
    out.push_back({"special_family", "dovetailing", st.stage(), std::to_string(st.trees().size()),
                   "expected " + std::to_string(expected) + " born trees"});
  for (std::size_t i = 0; i < st.trees().size(); ++i) {
    const auto& t = st.trees()[i];
    if (t.index() != i || t.birth_stage() != i)
      out.push_back({"special_family", "dovetailing", t.birth_stage(), "T" + std::to_string(i),
                     "tree i must be born at stage i"});
    for (const auto& [s, rec] : t.nodes())
      if (rec.enumerated_at < i)
        out.push_back({"special_family", "dovetailing", rec.enumerated_at,
                       "T" + std::to_string(i) + ":" + s.str(), "node before birth"});
  }
  return out;
}

inline Violations check_leaf_pair_liveness_all(const ConstructionState& st) {
  Violations out;
  for (const auto& t : st.trees())
    for (Stage s = t.birth_stage(); s <= st.stage(); ++s) append(out, check_leaf_pair_liveness(t, s));
  return out;
}

/// Every D entry has exactly one DiagonalizeD in the log at its stage, whose
/// evaluation re-verifies Halted{0}, with non-witness extensions Terminal.
inline Violations check_d_soundness(const ConstructionState& st) {
  Violations out;
  const std::string mod = "special_family";
  std::map<Natural, std::vector<const Action*>> by_x;
  Stage previous = 0;
  std::size_t previous_kind = 0;
  for (const auto& a : st.log()) {
    if (a.stage < previous || (a.stage == previous && a.kind() < previous_kind))
      out.push_back({mod, "log-order", a.stage, action_kind_name(a.kind()), "log out of order"});
    previous = a.stage;
    previous_kind = a.kind();
    if (const auto* d = std::get_if<action::DiagonalizeD>(&a.body)) by_x[d->follower].push_back(&a);
  }
  for (const auto& [x, stage] : st.diagonal_set()) {
    auto it = by_x.find(x);
    const std::size_t count = it == by_x.end() ? 0 : it->second.size();
    if (count != 1) {
      out.push_back({mod, "d-soundness", stage, "x=" + std::to_string(x),
                     std::to_string(count) + " justifying actions"});
      continue;
    }
    const Action& a = *it->second.front();
    const auto& d = std::get<action::DiagonalizeD>(a.body);
    if (a.stage != stage)
      out.push_back({mod, "d-soundness", a.stage, "x=" + std::to_string(x), "stage mismatch"});
    if (d.e >= st.registry().size() || d.extensions.size() != d.tuple.size()) {
      out.push_back({mod, "d-soundness", a.stage, "x=" + std::to_string(x), "malformed action"});
      continue;
    }
    const auto r = st.registry()[d.e].program.run(finite_join(d.extensions), x, a.stage);
    if (!r.halted_with(0))
      out.push_back({mod, "d-soundness", a.stage, "x=" + std::to_string(x),
                     "witness evaluation is not Halted{0}"});
    for (std::size_t k = 0; k < d.tuple.size(); ++k) {
      const auto& item = d.tuple[k];
      if (item.tree >= st.trees().size()) continue;
      const StagedTree& t = st.trees()[item.tree];
      const FinString& keep = d.extensions[k];
      if (!item.node.is_proper_prefix_of(keep) || !t.alive(keep, a.stage))
        out.push_back({mod, "d-soundness", a.stage, "T" + std::to_string(item.tree) + ":" + keep.str(),
                       "witness extension not an Alive extension of " + item.node.str()});
      auto [first, last] = t.extensions(item.node);
      for (auto n = first; n != last; ++n)
        if (n->second.present_at(a.stage) && !n->first.compatible_with(keep) &&
            n->second.status_at(a.stage) != NodeStatus::Terminal)
          out.push_back({mod, "diagonalize-prune", a.stage,
                         "T" + std::to_string(item.tree) + ":" + n->first.str(),
                         "non-witness extension still Alive"});
    }
  }
  for (const auto& [x, actions] : by_x)
    if (!st.diagonal_set().count(x))
      out.push_back({mod, "d-soundness", actions.front()->stage, "x=" + std::to_string(x),
                     "action without D entry"});

  // Followers: distinct, and not in D when assigned.
  std::set<Natural> seen;
  for (const auto& e : st.followers().entries()) {
    if (!seen.insert(e.follower).second)
      out.push_back({mod, "follower-unique", e.assigned_at, "x=" + std::to_string(e.follower), ""});
    if (st.in_d(e.follower, e.assigned_at))
      out.push_back({mod, "follower-fresh", e.assigned_at, "x=" + std::to_string(e.follower),
                     "already in D at assignment"});
  }
  return out;
}

/// After OddPrune(e,i,τ,τ₀,τ₁): τ₁ Alive, extensions of τ₀ compatible with τ Terminal.
inline Violations check_prune_soundness(const ConstructionState& st) {
  Violations out;
  for (const auto& a : st.log()) {
    const auto* p = std::get_if<action::OddPrune>(&a.body);
    if (!p) continue;
    const std::string tag = "T" + std::to_string(p->tree) + ":";
    if (p->tree >= st.trees().size()) {
      out.push_back({"special_family", "prune-soundness", a.stage, tag, "unknown tree"});
      continue;
    }
    const StagedTree& t = st.trees()[p->tree];
    if (p->tau1 && !t.alive(*p->tau1, a.stage))
      out.push_back({"special_family", "prune-soundness", a.stage, tag + p->tau1->str(),
                     "survivor not Alive"});
    auto [first, last] = t.extensions(p->tau0);
    for (auto n = first; n != last; ++n)
      if (n->second.present_at(a.stage) && n->first.compatible_with(p->tau) &&
          n->second.status_at(a.stage) != NodeStatus::Terminal)
        out.push_back({"special_family", "prune-soundness", a.stage, tag + n->first.str(),
                       "extension of " + p->tau0.str() + " compatible with " + p->tau.str() +
                           " still Alive"});
  }
  return out;
}

/// A Pending odd requirement is pruned at the next stage, and once pruned
/// stays Satisfied.
inline Violations check_odd_progress(const ConstructionState& st) {
  Violations out;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Stage>> prunes;  // (e,i) -> stages
  for (const auto& a : st.log())
    if (const auto* p = std::get_if<action::OddPrune>(&a.body))
      prunes[{p->e, p->tree}].push_back(a.stage);

  for (const auto& t : st.trees()) {
    const std::size_t i = t.index();
    for (std::size_t e = 0; e < st.registry().size(); ++e) {
      const auto& ps = prunes[{e, i}];
      for (Stage s = t.birth_stage(); s <= st.stage(); ++s) {
        const auto c = check_requirement_odd(st, e, i, s);
        if (c.satisfied) {
          continue;
        }
        const std::string w = "T" + std::to_string(i) + ":" + c.witness->str();
        if (!ps.empty() && ps.front() <= s)
          out.push_back({"special_family", "odd-stays-satisfied", s, w,
                         "Pending after the prune at stage " + std::to_string(ps.front())});
        if (s < st.stage() && std::find(ps.begin(), ps.end(), s + 1) == ps.end())
          out.push_back({"special_family", "odd-pruned-next-stage", s, w,
                         "no OddPrune for e=" + std::to_string(e) + " at stage " +
                             std::to_string(s + 1)});
      }
    }
  }
  return out;
}

inline Violations check_construction(const ConstructionState& st) {
  Violations out;
  append(out, check_dovetailing(st));
  for (const auto& t : st.trees()) append(out, check_tree_structure(t));
  append(out, check_leaf_pair_liveness_all(st));
  append(out, check_d_soundness(st));
  append(out, check_prune_soundness(st));
  append(out, check_odd_progress(st));
  return out;
}

// ---- chain ----------------------------------------------------------------

/// Every stage-d string of the base class matches 0*1*, a node ending in 1
/// has one child, and a node ending in 0 (or the root) has two.
inline Violations check_base_class_shape(const StagedTree& t, Stage stages) {
  Violations out;
  for (const auto& [s, rec] : t.nodes()) {
    if (!matches_zeros_then_ones(s))
      out.push_back({"chain_spectrum", "base-class-shape", rec.enumerated_at, s.str(), "not 0*1*"});
    if (rec.enumerated_at != s.size())
      out.push_back({"chain_spectrum", "base-class-stage", rec.enumerated_at, s.str(),
                     "expected at stage " + std::to_string(s.size())});
    if (s.size() >= stages) continue;
    const bool zero = t.contains(s.child(Sym::Zero), stages);
    const bool one = t.contains(s.child(Sym::One), stages);
    const bool branching = s.empty() || s.back() == Sym::Zero;
    if (!one || zero != branching)
      out.push_back({"chain_spectrum", "base-class-children", s.size() + 1, s.str(),
                     branching ? "expected children 0 and 1" : "expected only child 1"});
  }
  return out;
}

/// Markers end in '#', and each sits on the Π string of the stage before it
/// was recorded.
inline Violations check_marker_soundness(const QState& q) {
  Violations out;
  for (const auto& [m, stage] : q.markers) {
    if (m.empty() || m.back() != Sym::Hash)
      out.push_back({"chain_spectrum", "marker-soundness", stage, m.str(), "does not end in #"});
    if (!q.upsilon.contains(m, stage))
      out.push_back({"chain_spectrum", "marker-soundness", stage, m.str(), "not enumerated"});
    if (stage == 0 || stage > q.pi.size() || !m.is_prefix_of(q.pi[stage - 1]))
      out.push_back({"chain_spectrum", "marker-soundness", stage, m.str(), "not on Π"});
  }
  return out;
}

/// Above every marker υ: suffixes of grafted nodes lie in Λ (and, over a
/// binary Λ, every '#'-free suffix does), and every λ ∈ Λ with
/// |λ| <= S - stage(υ) appears as υ*λ.
inline Violations check_graft_soundness(const QState& q, std::size_t max_complete = SIZE_MAX) {
  Violations out;
  const bool binary = q.lambda.alphabet() == Alphabet::Binary;
  for (const auto& [node, marker] : q.graft_via)
    if (!marker.is_proper_prefix_of(node) || !q.lambda.contains(node.suffix_from(marker.size())))
      out.push_back({"chain_spectrum", "graft-soundness", q.upsilon.find(node)->enumerated_at,
                     node.str(), "suffix above " + marker.str() + " is not in Λ"});
  std::map<std::size_t, std::vector<FinString>> lambda_by_len;
  const std::size_t horizon = std::min<std::size_t>(q.stage, max_complete);
  for (auto& l : q.lambda.members(horizon)) lambda_by_len[l.size()].push_back(std::move(l));

  for (const auto& [m, stage] : q.markers) {
    if (binary) {
      auto [first, last] = q.upsilon.extensions(m);
      for (auto it = first; it != last; ++it) {
        const FinString rho = it->first.suffix_from(m.size());
        if (!rho.contains_hash() && !q.lambda.contains(rho))
          out.push_back({"chain_spectrum", "graft-soundness", it->second.enumerated_at,
                         it->first.str(), "suffix " + rho.str() + " above " + m.str() + " not in Λ"});
      }
    }
    const std::size_t room = std::min<std::size_t>(q.stage - stage, max_complete);
    for (const auto& [len, members] : lambda_by_len) {
      if (len > room) break;
      for (const auto& l : members)
        if (!q.upsilon.contains(concat(m, l.as(Alphabet::Ternary)), q.stage))
          out.push_back({"chain_spectrum", "graft-completeness", q.stage, m.str() + "*" + l.str(),
                         "Λ member missing above marker"});
    }
  }
  return out;
}

/// The longest enumerated prefix of Π_S decodes to f_S on its complete blocks.
inline Violations check_decode(const QState& q, std::size_t want_blocks) {
  Violations out;
  const FinString path = longest_pi_prefix(q);
  std::vector<Stage> got;
  try {
    got = decode_blocks(path);
  } catch (const decode_error& e) {
    out.push_back({"chain_spectrum", "decode", q.stage, path.str(), e.what()});
    return out;
  }
  const EnumFnApprox f = enum_fn_approx(q.enumeration, q.stage);
  if (got.size() < want_blocks)
    out.push_back({"chain_spectrum", "decode", q.stage, path.str(),
                   "only " + std::to_string(got.size()) + " complete blocks"});
  for (std::size_t n = 0; n < got.size() && n < f.values.size(); ++n)
    if (got[n] != f.values[n])
      out.push_back({"chain_spectrum", "decode", q.stage, path.str(),
                     "block " + std::to_string(n) + " decodes to " + std::to_string(got[n]) +
                         ", f(" + std::to_string(n) + ") = " + std::to_string(f.values[n])});
  return out;
}

/// Every λ ∈ Λ_prev with |λ| <= depth sits above some marker of the next level.
inline Violations check_embedding(const QState& next, const ClosureTree& prev, std::size_t depth) {
  Violations out;
  for (const auto& l : prev.members(depth)) {
    bool found = false;
    for (const auto& [m, stage] : next.markers)
      if (next.upsilon.contains(concat(m, l.as(Alphabet::Ternary)), next.stage)) {
        found = true;
        break;
      }
    if (!found)
      out.push_back({"chain_spectrum", "embedding", next.stage, l.str(),
                     "no marker carries this member"});
  }
  return out;
}

}  // namespace pi01
