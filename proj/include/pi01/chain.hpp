#pragma once

// Enumeration functions of r.e. sets, class copies, the all-computable base
// class, the ternary tree Υ coding f_s with '#'-delimited blocks and carrying
// grafted copies of a previous class, and the tagged chain union.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pi01/machine.hpp"
#include "pi01/tree.hpp"

namespace pi01 {

class decode_error : public workbench_error {
 public:
  decode_error(std::size_t position, const std::string& what)
      : workbench_error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A staged enumeration A_0 ⊆ A_1 ⊆ ... given by a table of entry stages or
/// by a program (x enters once Ψ(∅;x) halts within s steps, x <= s).
class ReEnumeration {
 public:
  ReEnumeration() = default;

  static ReEnumeration from_table(const std::vector<std::pair<Stage, Natural>>& table) {
    ReEnumeration out;
    for (const auto& [stage, x] : table)
      if (!out.table_.emplace(x, stage).second)
        throw workbench_error("element " + std::to_string(x) + " enters twice");
    return out;
  }

  static ReEnumeration from_program(Program program) {
    ReEnumeration out;
    out.program_ = std::move(program);
    return out;
  }

  bool is_table() const noexcept { return !program_.has_value(); }
  const std::map<Natural, Stage>& table() const noexcept { return table_; }
  const std::optional<Program>& program() const noexcept { return program_; }

  /// The stage at which x enters, if it does by `horizon`.
  std::optional<Stage> entry_stage(Natural x, Stage horizon) const {
    if (program_) {
      const auto r = program_->run(FinString(), x, horizon);
      if (!r.is_halted()) return std::nullopt;
      return std::max<Stage>(x, r.halted->steps);
    }
    auto it = table_.find(x);
    if (it == table_.end() || it->second > horizon) return std::nullopt;
    return it->second;
  }

  /// A_s restricted to elements below `bound`.
  std::set<Natural> at(Stage s, Natural bound) const {
    std::set<Natural> out;
    if (program_) {
      for (Natural x = 0; x < bound && x <= s; ++x)
        if (entry_stage(x, s)) out.insert(x);
    } else {
      for (const auto& [x, stage] : table_)
        if (x < bound && stage <= s) out.insert(x);
    }
    return out;
  }

  friend bool operator==(const ReEnumeration&, const ReEnumeration&) = default;

 private:
  std::map<Natural, Stage> table_;
  std::optional<Program> program_;
};

/// f_s(0..s).
struct EnumFnApprox {
  Stage s = 0;
  std::vector<Stage> values;

  Stage operator()(Natural n) const { return values.at(n); }
};

/// f_s(n) = least s' <= s with A_{s'}↾n = A_s↾n.
inline Stage enum_fn(const ReEnumeration& a, Stage s, Natural n) {
  if (n > s) throw workbench_error("enum_fn needs n <= s");
  // A_{s'}↾n = A_s↾n exactly when every x < n in A_s has entered by s'.
  Stage f = 0;
  for (Natural x = 0; x < n; ++x)
    if (auto e = a.entry_stage(x, s)) f = std::max(f, *e);
  return f;
}

inline EnumFnApprox enum_fn_approx(const ReEnumeration& a, Stage s) {
  EnumFnApprox out{s, {}};
  out.values.reserve(s + 1);
  Stage f = 0;
  for (Natural n = 0; n <= s; ++n) {
    out.values.push_back(f);
    if (auto e = a.entry_stage(n, s)) f = std::max(f, *e);
  }
  return out;
}

/// Blocks 1^{f(n)+1}# for n < blocks.
inline FinString pi_strings(const EnumFnApprox& f, std::size_t blocks) {
  if (blocks > f.s + 1 || blocks > f.values.size())
    throw workbench_error("pi_strings: " + std::to_string(blocks) + " blocks exceed stage " +
                          std::to_string(f.s));
  FinString out(Alphabet::Ternary);
  for (std::size_t n = 0; n < blocks; ++n) {
    for (Stage k = 0; k <= f.values[n]; ++k) out.push_back(Sym::One);
    out.push_back(Sym::Hash);
  }
  return out;
}

/// Inverse of pi_strings; the input must be a sequence of complete blocks.
inline std::vector<Stage> decode_path(const FinString& sigma) {
  std::vector<Stage> out;
  std::size_t run = 0;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    switch (sigma[k]) {
      case Sym::One: ++run; break;
      case Sym::Hash:
        if (run == 0) throw decode_error(k, "empty block ending at position " + std::to_string(k));
        out.push_back(run - 1);
        run = 0;
        break;
      case Sym::Zero:
        throw decode_error(k, "symbol 0 inside a block at position " + std::to_string(k));
    }
  }
  if (run != 0)
    throw decode_error(sigma.size(), "unterminated block at position " + std::to_string(sigma.size()));
  return out;
}

/// Decodes the complete blocks of σ, ignoring an unterminated tail.
inline std::vector<Stage> decode_blocks(const FinString& sigma) {
  std::size_t end = sigma.size();
  while (end > 0 && sigma[end - 1] != Sym::Hash) --end;
  return decode_path(sigma.prefix(end));
}

/// {τ*σ : σ ∈ Λ, |σ| <= depth}.
inline std::vector<FinString> copy(const FinString& tau, const ClosureTree& lambda,
                                   std::size_t depth) {
  std::vector<FinString> out;
  const FinString base = tau.as(Alphabet::Ternary);
  for (const auto& s : lambda.members(depth)) out.push_back(concat(base, s));
  return out;
}

/// The 0*1* tree: a leaf ending in 1 gets child 1, a leaf ending in 0 (or ε)
/// gets children 0 and 1.
inline StagedTree base_computable_class(Stage stages) {
  StagedTree t(0, 0);
  t.enumerate(FinString(), 0, "root");
  for (Stage s = 1; s <= stages; ++s) {
    for (const auto& leaf : leaves(t, s - 1, true)) {
      if (leaf.empty() || leaf.back() == Sym::Zero) t.enumerate(leaf.child(Sym::Zero), s, "base");
      t.enumerate(leaf.child(Sym::One), s, "base");
    }
    t.touch(s);
  }
  return t;
}

inline bool matches_zeros_then_ones(const FinString& s) {
  bool seen_one = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == Sym::One) seen_one = true;
    else if (s[k] == Sym::Zero && seen_one) return false;
    else if (s[k] == Sym::Hash) return false;
  }
  return true;
}

struct QState {
  StagedTree upsilon{0, 0, Alphabet::Ternary};
  std::map<FinString, Stage> markers;        // Υ* with the stage rule (i) reached each
  std::map<FinString, FinString> graft_via;  // grafted node -> marker it was copied above
  ClosureTree lambda;
  std::vector<FinString> pi;                 // pi[t] = Π string used at stage t+1
  ReEnumeration enumeration;
  Stage stage = 0;

  Stage marker_stage(const FinString& m) const { return markers.at(m); }
};

namespace detail {

/// (node, marker length) pairs whose children are tested against Λ next stage.
using GraftFrontier = std::set<std::pair<FinString, std::size_t>>;

inline void graft_candidates(const QState& q, const FinString& node, GraftFrontier& out) {
  const bool binary = q.lambda.alphabet() == Alphabet::Binary;
  for (std::size_t end = node.size(); end-- > 0;) {
    if (node[end] != Sym::Hash) continue;
    const std::size_t len = end + 1;
    if (q.markers.count(node.prefix(len)) && q.lambda.contains(node.suffix_from(len)))
      out.emplace(node, len);
    // Over a binary Λ only the last marker can carry a '#'-free suffix.
    if (binary) break;
  }
}

}  // namespace detail

/// Drives Υ stage by stage.
class QBuilder {
 public:
  QBuilder(ReEnumeration enumeration, ClosureTree lambda) {
    q_.enumeration = std::move(enumeration);
    q_.lambda = std::move(lambda);
    q_.upsilon.enumerate(FinString(Alphabet::Ternary), 0, "root");
  }

  const QState& state() const noexcept { return q_; }
  QState take() { return std::move(q_); }

  void advance() {
    const Stage t = q_.stage;
    const Stage s = t + 1;
    q_.stage = s;
    q_.upsilon.touch(s);
    const FinString pi = pi_strings(enum_fn_approx(q_.enumeration, t), t);
    q_.pi.push_back(pi);

    detail::GraftFrontier next;

    // (i) one more symbol along Π_t wherever its parent is already present
    for (std::size_t len = 1; len <= pi.size(); ++len) {
      if (!q_.upsilon.contains(pi.prefix(len - 1), t)) break;
      const FinString c = pi.prefix(len);
      const bool fresh = q_.upsilon.enumerate(c, s, "pi");
      if (c.back() == Sym::Hash && !q_.markers.count(c)) {
        q_.markers.emplace(c, s);
        if (q_.lambda.contains(FinString(Alphabet::Ternary))) next.emplace(c, c.size());
      }
      if (fresh) detail::graft_candidates(q_, c, next);
    }

    // (ii) copies of Λ above markers
    const bool ternary = q_.lambda.alphabet() == Alphabet::Ternary;
    for (const auto& [node, mlen] : frontier_) {
      const FinString rho = node.suffix_from(mlen);
      for (Sym i : {Sym::Zero, Sym::One, Sym::Hash}) {
        if (i == Sym::Hash && !ternary) continue;
        FinString rho_i = rho.as(Alphabet::Ternary);
        rho_i.push_back(i);
        if (!q_.lambda.contains(rho_i)) continue;
        const FinString child = node.child(i);
        if (q_.upsilon.enumerate(child, s, "graft")) q_.graft_via.emplace(child, node.prefix(mlen));
        next.emplace(child, mlen);
      }
    }
    frontier_ = std::move(next);
  }

 private:
  QState q_;
  detail::GraftFrontier frontier_;
};

inline QState build_Q(const ReEnumeration& enumeration, const ClosureTree& lambda, Stage stages) {
  QBuilder b(enumeration, lambda);
  for (Stage k = 0; k < stages; ++k) b.advance();
  return b.take();
}

/// The longest enumerated prefix of the final Π string.
inline FinString longest_pi_prefix(const QState& q) {
  const FinString pi = pi_strings(enum_fn_approx(q.enumeration, q.stage), q.stage);
  std::size_t len = 0;
  while (len < pi.size() && q.upsilon.contains(pi.prefix(len + 1), q.stage)) ++len;
  return pi.prefix(len);
}

inline std::shared_ptr<const StagedTree> share(StagedTree t) {
  return std::make_shared<const StagedTree>(std::move(t));
}

/// Λ of a finished Υ: prefixes of nodes present at its last stage.
inline ClosureTree closure_of(const QState& q) {
  return ClosureTree(share(q.upsilon), ClosureTree::Cutoff::Horizon);
}

inline ClosureTree base_class_closure(Stage stages) {
  return ClosureTree(share(base_computable_class(stages)), ClosureTree::Cutoff::FromBirth);
}

struct Chain {
  std::vector<QState> levels;
  StagedTree union_tree{0, 0, Alphabet::Ternary};
};

/// Tree j of the union sits above the tag 0^j 1.
inline StagedTree tagged_union(const std::vector<const StagedTree*>& trees) {
  StagedTree out(0, 0, Alphabet::Ternary);
  Stage last = 0;
  for (const auto* t : trees) last = std::max(last, t->last_stage());
  for (std::size_t j = 0; j < trees.size(); ++j) {
    FinString tag = FinString::repeat(Sym::Zero, j, Alphabet::Ternary);
    for (std::size_t k = 0; k <= j; ++k) out.enumerate(tag.prefix(k), 0, "tag");
    tag.push_back(Sym::One);
    for (const auto& [node, rec] : trees[j]->nodes()) {
      NodeRecord r = rec;
      r.origin = "level " + std::to_string(j + 1);
      out.restore(concat(tag, node.as(Alphabet::Ternary)), r);
    }
  }
  out.touch(last);
  return out;
}

inline Chain iterate_chain(const std::vector<ReEnumeration>& enums, Stage stages) {
  if (enums.empty()) throw workbench_error("iterate_chain needs at least one enumeration");
  Chain out;
  ClosureTree lambda = base_class_closure(stages);
  for (const auto& a : enums) {
    out.levels.push_back(build_Q(a, lambda, stages));
    lambda = closure_of(out.levels.back());
  }
  std::vector<const StagedTree*> trees;
  for (const auto& q : out.levels) trees.push_back(&q.upsilon);
  out.union_tree = tagged_union(trees);
  return out;
}

}  // namespace pi01
