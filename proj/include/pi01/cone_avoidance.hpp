#pragma once

// Finite-depth subtree selection away from a lower cone (a functional of the
// join must disagree with some member) and from an upper cone (U_n sets),
// with the jump oracle replaced by a step budget.

#include <optional>
#include <string>
#include <vector>

#include "pi01/join.hpp"
#include "pi01/machine.hpp"
#include "pi01/tree.hpp"

namespace pi01 {

/// Converged{value} or Unknown after spending `budget` steps.
struct ConvergenceAnswer {
  std::optional<Natural> value;
  Natural budget = 0;

  bool converged() const noexcept { return value.has_value(); }
  friend bool operator==(const ConvergenceAnswer&, const ConvergenceAnswer&) = default;
};

inline ConvergenceAnswer ask(const Program& program, const FinString& oracle, Natural n,
                             Natural budget) {
  auto r = program.run(oracle, n, budget);
  return {r.is_halted() ? std::optional<Natural>(r.halted->value) : std::nullopt, budget};
}

struct IncompatiblePair {
  FinString sigma, tau;
  std::size_t n = 0;  // least disagreement position
};

struct CaseOneReport {
  std::size_t n = 0;
  std::size_t m = 0;  // every string of length m in T halts with k
  Natural k = 0;
};

struct SubtreeResult {
  enum class Kind { Compatible, Unrestricted, UnSet, CaseOne, Unknown };

  Kind kind = Kind::Unrestricted;
  std::optional<FinString> root;        // Compatible: T* = strings compatible with root
  std::vector<FinString> members;       // UnSet: T* = U_n up to depth
  std::optional<IncompatiblePair> pair;
  std::optional<std::size_t> n;
  std::optional<ConvergenceAnswer> answer;
  std::optional<CaseOneReport> case_one;
  std::size_t depth = 0;
  Natural budget = 0;
  std::size_t running_members = 0;  // U_n members admitted only because eval was Running
  std::string note;
};

inline const char* kind_name(SubtreeResult::Kind k) {
  switch (k) {
    case SubtreeResult::Kind::Compatible: return "compatible";
    case SubtreeResult::Kind::Unrestricted: return "unrestricted";
    case SubtreeResult::Kind::UnSet: return "U_n";
    case SubtreeResult::Kind::CaseOne: return "case1";
    case SubtreeResult::Kind::Unknown: return "unknown";
  }
  return "?";
}

/// The full binary tree up to `depth`, all nodes enumerated at stage 0.
inline StagedTree full_binary_tree(std::size_t depth) {
  StagedTree t(0, 0);
  std::vector<FinString> frontier{FinString()};
  t.enumerate(FinString(), 0, "full");
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<FinString> next;
    for (const auto& s : frontier)
      for (Sym b : {Sym::Zero, Sym::One}) {
        next.push_back(s.child(b));
        t.enumerate(next.back(), 0, "full");
      }
    frontier = std::move(next);
  }
  return t;
}

/// Members of T: Alive nodes at `stage`, length <= depth, length-lex order.
inline std::vector<FinString> tree_members(const StagedTree& t, std::size_t depth, Stage stage) {
  return alive_nodes(t, stage, depth);
}

/// The least pair of incompatible depth-extendible strings (σ first, then τ,
/// both length-lex) and their least disagreement.
inline IncompatiblePair least_incompatible_extendibles(const StagedTree& t, std::size_t depth,
                                                       Stage stage) {
  std::vector<FinString> candidates;
  for (const auto& s : alive_nodes(t, stage, depth))
    if (extendible_to_depth(t, s, depth, stage)) candidates.push_back(s);
  for (std::size_t a = 0; a < candidates.size(); ++a)
    for (std::size_t b = a + 1; b < candidates.size(); ++b)
      if (auto n = candidates[a].first_disagreement(candidates[b]))
        return {candidates[a], candidates[b], *n};
  throw not_found_error("no two incompatible strings extendible to depth " +
                        std::to_string(depth));
}

/// Strings of T (to depth) compatible with `root`.
inline std::vector<FinString> compatible_restriction(const StagedTree& t, const FinString& root,
                                                     std::size_t depth, Stage stage) {
  std::vector<FinString> out;
  for (auto& s : tree_members(t, depth, stage))
    if (s.compatible_with(root)) out.push_back(std::move(s));
  return out;
}

inline SubtreeResult lower_cone_subtree(const StagedTree& t, const std::vector<FinString>& rows,
                                        const Program& j, Natural budget, std::size_t depth,
                                        Stage stage) {
  SubtreeResult out;
  out.depth = depth;
  out.budget = budget;
  const IncompatiblePair p = least_incompatible_extendibles(t, depth, stage);
  out.pair = p;
  out.n = p.n;
  const FinString oracle = join_oracle(rows).determined_prefix();
  out.answer = ask(j, oracle, p.n, budget);
  if (!out.answer->converged()) {
    out.kind = SubtreeResult::Kind::Unrestricted;
    out.note = "Unknown: no convergence within budget";
    return out;
  }
  const Natural v = *out.answer->value;
  out.kind = SubtreeResult::Kind::Compatible;
  out.root = static_cast<Natural>(p.sigma.bit(p.n)) != v ? p.sigma : p.tau;
  return out;
}

inline bool in_u_n(const Program& i, const FinString& sigma, int x_n, Natural n, Natural budget) {
  const auto r = i.run(constant_join(sigma).determined_prefix(), n, budget);
  return !r.is_halted() || r.halted->value != static_cast<Natural>(x_n);
}

/// U_n = {σ ∈ T, |σ| <= depth : Ψ_i(⊕σ;n) diverges or differs from X(n)}.
inline std::vector<FinString> compute_U_n(const StagedTree& t, const Program& i,
                                          const FinString& x, Natural n, std::size_t depth,
                                          Natural budget, Stage stage) {
  if (n >= x.size())
    throw workbench_error("n = " + std::to_string(n) + " is beyond |X| = " +
                          std::to_string(x.size()));
  const int xn = x.bit(n);
  std::vector<FinString> out;
  for (auto& s : tree_members(t, depth, stage))
    if (in_u_n(i, s, xn, n, budget)) out.push_back(std::move(s));
  return out;
}

inline SubtreeResult upper_cone_subtree(const StagedTree& t, const Program& i, const FinString& x,
                                        std::size_t depth, Natural budget, Stage stage) {
  SubtreeResult out;
  out.depth = depth;
  out.budget = budget;

  const auto members = tree_members(t, depth, stage);
  std::vector<bool> has_length(depth + 1, false);
  for (const auto& s : members) has_length[s.size()] = true;
  for (std::size_t m = 0; m <= depth; ++m)
    if (!has_length[m]) {
      out.kind = SubtreeResult::Kind::Unknown;
      out.note = "T has no string of length " + std::to_string(m);
      return out;
    }

  std::optional<CaseOneReport> first_miss;
  for (Natural n = 0; n < x.size(); ++n) {
    const int xn = x.bit(n);
    std::vector<FinString> u;
    std::vector<bool> hit(depth + 1, false);
    std::size_t running = 0;
    for (const auto& s : members) {
      const auto r = i.run(constant_join(s).determined_prefix(), n, budget);
      if (r.is_halted() && r.halted->value == static_cast<Natural>(xn)) continue;
      if (!r.is_halted()) ++running;
      hit[s.size()] = true;
      u.push_back(s);
    }
    std::size_t m = 0;
    while (m <= depth && hit[m]) ++m;
    if (m > depth) {
      out.kind = SubtreeResult::Kind::UnSet;
      out.n = n;
      out.members = std::move(u);
      out.running_members = running;
      if (running) out.note = "Unknown: " + std::to_string(running) + " members undecided at budget";
      return out;
    }
    // Every string of length m halted with X(n).
    if (!first_miss) first_miss = CaseOneReport{static_cast<std::size_t>(n), m,
                                                static_cast<Natural>(xn)};
  }
  if (!first_miss) {
    out.kind = SubtreeResult::Kind::Unknown;
    out.note = "X is empty";
    return out;
  }
  out.kind = SubtreeResult::Kind::CaseOne;
  out.case_one = first_miss;
  out.n = first_miss->n;
  out.note = "every U_n is finite below |X|: X is computable from the functional";
  return out;
}

}  // namespace pi01
