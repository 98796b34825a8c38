#pragma once

// Stage-indexed enumerated trees with terminal marking, and their downward
// closures.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pi01/strings.hpp"

namespace pi01 {

using Stage = std::uint64_t;

class not_found_error : public workbench_error {
 public:
  using workbench_error::workbench_error;
};

class no_predecessor_error : public workbench_error {
 public:
  using workbench_error::workbench_error;
};

class tree_error : public workbench_error {
 public:
  using workbench_error::workbench_error;
};

enum class NodeStatus : std::uint8_t { Alive, Terminal };

inline const char* status_name(NodeStatus s) noexcept {
  return s == NodeStatus::Alive ? "alive" : "terminal";
}

struct NodeRecord {
  Stage enumerated_at = 0;
  std::optional<Stage> terminal_since;
  std::string origin;  // rule that enumerated the node
  std::string cause;   // requirement that declared it terminal

  bool present_at(Stage s) const noexcept { return enumerated_at <= s; }
  NodeStatus status_at(Stage s) const noexcept {
    return terminal_since && *terminal_since <= s ? NodeStatus::Terminal : NodeStatus::Alive;
  }
  Stage status_since_at(Stage s) const noexcept {
    return status_at(s) == NodeStatus::Terminal ? *terminal_since : enumerated_at;
  }

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

/// A tree T enumerated stage by stage. Nodes are never removed; Terminal is
/// absorbing. Every query takes the snapshot stage it refers to, so the
/// full stage log is the tree itself.
class StagedTree {
 public:
  using NodeMap = std::map<FinString, NodeRecord>;

  StagedTree() = default;
  StagedTree(std::size_t index, Stage birth_stage, Alphabet alphabet = Alphabet::Binary)
      : index_(index), birth_stage_(birth_stage), last_stage_(birth_stage), alphabet_(alphabet) {}

  std::size_t index() const noexcept { return index_; }
  Stage birth_stage() const noexcept { return birth_stage_; }
  Stage last_stage() const noexcept { return last_stage_; }
  Alphabet alphabet() const noexcept { return alphabet_; }
  const NodeMap& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Advances the stage counter without enumerating anything.
  void touch(Stage s) { last_stage_ = std::max(last_stage_, s); }

  /// Enumerates σ at stage s. Returns false when σ was already enumerated.
  /// Throws when s precedes birth or σ extends a node Terminal by stage s.
  bool enumerate(const FinString& sigma, Stage s, std::string origin = {}) {
    if (s < birth_stage_)
      throw tree_error("tree " + std::to_string(index_) + " enumerates " + sigma.str() +
                       " at stage " + std::to_string(s) + " before its birth stage " +
                       std::to_string(birth_stage_));
    if (alphabet_ == Alphabet::Binary && sigma.contains_hash())
      throw alphabet_error("ternary string " + sigma.str() + " in binary tree");
    if (nodes_.count(sigma)) return false;
    if (terminal_count_ > 0) {
      for (std::size_t k = 0; k < sigma.size(); ++k) {
        auto it = nodes_.find(sigma.prefix(k));
        if (it != nodes_.end() && it->second.status_at(s) == NodeStatus::Terminal)
          throw tree_error("cannot enumerate " + sigma.str() + ": prefix " + it->first.str() +
                           " is terminal since stage " +
                           std::to_string(*it->second.terminal_since));
      }
    }
    nodes_.emplace(sigma.as(alphabet_), NodeRecord{s, std::nullopt, std::move(origin), {}});
    touch(s);
    return true;
  }

  /// Marks σ Terminal at stage s; false if it already was.
  bool mark_terminal(const FinString& sigma, Stage s, std::string cause = {}) {
    auto it = nodes_.find(sigma);
    if (it == nodes_.end()) throw not_found_error(sigma.str() + " is not enumerated");
    if (it->second.terminal_since) return false;
    it->second.terminal_since = s;
    it->second.cause = std::move(cause);
    ++terminal_count_;
    touch(s);
    return true;
  }

  const NodeRecord* find(const FinString& sigma) const {
    auto it = nodes_.find(sigma);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  bool contains(const FinString& sigma, Stage s) const {
    const auto* r = find(sigma);
    return r && r->present_at(s);
  }

  bool alive(const FinString& sigma, Stage s) const {
    const auto* r = find(sigma);
    return r && r->present_at(s) && r->status_at(s) == NodeStatus::Alive;
  }

  /// Iterator range over enumerated proper extensions of σ (all stages).
  std::pair<NodeMap::const_iterator, NodeMap::const_iterator> extensions(
      const FinString& sigma) const {
    auto first = nodes_.upper_bound(sigma);
    auto last = first;
    while (last != nodes_.end() && sigma.is_prefix_of(last->first)) ++last;
    return {first, last};
  }

  /// Restores a node verbatim; used when loading snapshots.
  void restore(const FinString& sigma, NodeRecord record) {
    if (record.terminal_since) ++terminal_count_;
    touch(std::max(record.enumerated_at, record.terminal_since.value_or(0)));
    nodes_[sigma.as(alphabet_)] = std::move(record);
  }

  friend bool operator==(const StagedTree& a, const StagedTree& b) {
    return a.index_ == b.index_ && a.birth_stage_ == b.birth_stage_ &&
           a.last_stage_ == b.last_stage_ && a.alphabet_ == b.alphabet_ && a.nodes_ == b.nodes_;
  }

 private:
  std::size_t index_ = 0;
  Stage birth_stage_ = 0;
  Stage last_stage_ = 0;
  Alphabet alphabet_ = Alphabet::Binary;
  std::size_t terminal_count_ = 0;
  NodeMap nodes_;
};

/// Nodes at snapshot `stage` with no enumerated proper extension, in
/// length-lex order.
inline std::vector<FinString> leaves(const StagedTree& tree, Stage stage, bool alive_only) {
  std::vector<FinString> out;
  if (stage < tree.birth_stage()) return out;
  const auto& nodes = tree.nodes();
  for (auto it = nodes.begin(); it != nodes.end(); ++it) {
    if (!it->second.present_at(stage)) continue;
    auto next = std::next(it);
    while (next != nodes.end() && !next->second.present_at(stage)) ++next;
    const bool leaf = next == nodes.end() || !it->first.is_prefix_of(next->first);
    if (!leaf) continue;
    if (alive_only && it->second.status_at(stage) != NodeStatus::Alive) continue;
    out.push_back(it->first);
  }
  std::sort(out.begin(), out.end(), LengthLexLess{});
  return out;
}

/// Number of enumerated proper prefixes of σ at `stage` (tree depth, not
/// string length).
inline std::size_t level(const StagedTree& tree, const FinString& sigma, Stage stage) {
  std::size_t count = 0;
  for (std::size_t k = 0; k < sigma.size(); ++k)
    if (tree.contains(sigma.prefix(k), stage)) ++count;
  return count;
}

inline std::size_t height(const StagedTree& tree, Stage stage) {
  std::size_t h = 0;
  for (const auto& [s, rec] : tree.nodes())
    if (rec.present_at(stage)) h = std::max(h, s.size());
  return h;
}

inline FinString immediate_predecessor(const StagedTree& tree, const FinString& sigma,
                                       Stage stage) {
  if (!tree.contains(sigma, stage))
    throw not_found_error(sigma.str() + " is not enumerated in tree " +
                          std::to_string(tree.index()) + " at stage " + std::to_string(stage));
  for (std::size_t k = sigma.size(); k-- > 0;) {
    FinString p = sigma.prefix(k);
    if (tree.contains(p, stage)) return p;
  }
  throw no_predecessor_error(sigma.str() + " is the root of tree " +
                             std::to_string(tree.index()));
}

/// Marks Terminal every proper extension of τ₀ enumerated by `stage` that is
/// compatible with `prune_target` (all of them when no target is given).
/// Returns the number of nodes newly marked.
inline std::size_t declare_terminal_cone(StagedTree& tree, const FinString& tau0,
                                         const std::optional<FinString>& prune_target,
                                         Stage stage, const std::string& cause = {}) {
  if (!tree.contains(tau0, stage))
    throw not_found_error(tau0.str() + " is not enumerated in tree " +
                          std::to_string(tree.index()));
  std::vector<FinString> doomed;
  auto [first, last] = tree.extensions(tau0);
  for (auto it = first; it != last; ++it) {
    if (!it->second.present_at(stage) || it->second.terminal_since) continue;
    if (!prune_target || it->first.compatible_with(*prune_target)) doomed.push_back(it->first);
  }
  for (const auto& s : doomed) tree.mark_terminal(s, stage, cause);
  return doomed.size();
}

/// Marks Terminal every proper extension of σ enumerated by `stage` that is
/// incompatible with `keep`.
inline std::size_t declare_terminal_except(StagedTree& tree, const FinString& sigma,
                                           const FinString& keep, Stage stage,
                                           const std::string& cause = {}) {
  if (!tree.contains(sigma, stage))
    throw not_found_error(sigma.str() + " is not enumerated in tree " +
                          std::to_string(tree.index()));
  std::vector<FinString> doomed;
  auto [first, last] = tree.extensions(sigma);
  for (auto it = first; it != last; ++it) {
    if (!it->second.present_at(stage) || it->second.terminal_since) continue;
    if (!it->first.compatible_with(keep)) doomed.push_back(it->first);
  }
  for (const auto& s : doomed) tree.mark_terminal(s, stage, cause);
  return doomed.size();
}

/// Some Alive node of length >= depth extends σ at `stage`.
inline bool extendible_to_depth(const StagedTree& tree, const FinString& sigma,
                                std::size_t depth, Stage stage) {
  if (tree.alive(sigma, stage) && sigma.size() >= depth) return true;
  auto [first, last] = tree.extensions(sigma);
  for (auto it = first; it != last; ++it)
    if (it->first.size() >= depth && it->second.present_at(stage) &&
        it->second.status_at(stage) == NodeStatus::Alive)
      return true;
  return false;
}

/// Alive nodes present at `stage`, length-lex ordered, optionally capped in length.
inline std::vector<FinString> alive_nodes(const StagedTree& tree, Stage stage,
                                          std::size_t max_length = SIZE_MAX) {
  std::vector<FinString> out;
  for (const auto& [s, rec] : tree.nodes())
    if (s.size() <= max_length && rec.present_at(stage) &&
        rec.status_at(stage) == NodeStatus::Alive)
      out.push_back(s);
  std::sort(out.begin(), out.end(), LengthLexLess{});
  return out;
}

/// The downward-closed set Λ of initial segments of nodes of a StagedTree.
///
/// With `Cutoff::FromBirth`, σ ∈ Λ iff σ is a prefix of a node enumerated by
/// stage birth + |σ|, so membership consults one finite snapshot. With
/// `Cutoff::Horizon` the snapshot is the tree's last stage.
class ClosureTree {
 public:
  enum class Cutoff : std::uint8_t { FromBirth, Horizon };

  ClosureTree() = default;
  explicit ClosureTree(std::shared_ptr<const StagedTree> source,
                       Cutoff cutoff = Cutoff::FromBirth)
      : source_(std::move(source)), cutoff_(cutoff) {
    index_earliest();
  }

  const StagedTree& source() const { return *source_; }
  std::shared_ptr<const StagedTree> source_ptr() const { return source_; }
  Cutoff cutoff() const noexcept { return cutoff_; }
  Alphabet alphabet() const { return source_->alphabet(); }

  Stage cutoff_stage(std::size_t length) const {
    if (cutoff_ == Cutoff::Horizon) return source_->last_stage();
    return source_->birth_stage() + length;
  }

  bool contains(const FinString& sigma) const {
    if (alphabet() == Alphabet::Binary && sigma.contains_hash()) return false;
    auto it = earliest_.find(sigma);
    return it != earliest_.end() && it->second <= cutoff_stage(sigma.size());
  }

  /// All members of length <= max_length, length-lex ordered.
  std::vector<FinString> members(std::size_t max_length) const {
    std::vector<FinString> out;
    for (const auto& [s, earliest] : earliest_)
      if (s.size() <= max_length && earliest <= cutoff_stage(s.size())) out.push_back(s);
    std::sort(out.begin(), out.end(), LengthLexLess{});
    return out;
  }

 private:
  // earliest_[ρ] = least stage at which some node extending ρ was enumerated
  void index_earliest() {
    std::vector<std::map<FinString, Stage>> by_length;
    for (const auto& [s, rec] : source_->nodes()) {
      if (by_length.size() <= s.size()) by_length.resize(s.size() + 1);
      auto [it, fresh] = by_length[s.size()].emplace(s, rec.enumerated_at);
      if (!fresh) it->second = std::min(it->second, rec.enumerated_at);
    }
    for (std::size_t len = by_length.size(); len-- > 0;) {
      for (const auto& [s, stage] : by_length[len]) {
        earliest_.emplace(s, stage);
        if (len == 0) continue;
        auto [it, fresh] = by_length[len - 1].emplace(s.prefix(len - 1), stage);
        if (!fresh) it->second = std::min(it->second, stage);
      }
    }
  }

  std::shared_ptr<const StagedTree> source_;
  Cutoff cutoff_ = Cutoff::FromBirth;
  std::map<FinString, Stage> earliest_;
};

}  // namespace pi01
