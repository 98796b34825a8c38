#pragma once

// Finite joins (position (n+1)i + j carries component j at i) and infinite
// joins (position <j,x> carries row j at x) over finite strings.

#include <span>
#include <string>
#include <vector>

#include "pi01/strings.hpp"

namespace pi01 {

class join_error : public workbench_error {
 public:
  using workbench_error::workbench_error;
};

class undetermined_position_error : public workbench_error {
 public:
  undetermined_position_error(Natural position, const std::string& what)
      : workbench_error(what), position_(position) {}
  Natural position() const noexcept { return position_; }

 private:
  Natural position_;
};

/// The join of n+1 binary strings, truncated to (n+1)·min|component| so it
/// never claims a bit no component determines.
inline FinString finite_join(std::span<const FinString> components) {
  if (components.empty()) throw join_error("finite_join of an empty component list");
  std::size_t m = components.front().size();
  for (const auto& c : components) {
    if (c.contains_hash()) throw alphabet_error("join component " + c.str() + " is not binary");
    m = std::min(m, c.size());
  }
  FinString out(Alphabet::Binary);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& c : components) out.push_back(c[i]);
  return out;
}

inline FinString finite_join(std::initializer_list<FinString> components) {
  return finite_join(std::span<const FinString>(components.begin(), components.size()));
}

/// Unweaves a joined string into `arity` components; component j collects
/// positions ≡ j (mod arity).
inline std::vector<FinString> finite_join_decode(const FinString& joined, std::size_t arity) {
  if (arity == 0) throw join_error("finite_join_decode with arity 0");
  std::vector<FinString> out(arity, FinString(Alphabet::Binary));
  for (std::size_t k = 0; k < joined.size(); ++k) out[k % arity].push_back(joined[k]);
  return out;
}

/// Partial oracle for ⊕{A_j} given finite rows A_j↾|row j| for j < r.
class InfiniteJoinOracle {
 public:
  InfiniteJoinOracle() = default;
  explicit InfiniteJoinOracle(std::vector<FinString> rows) : rows_(std::move(rows)) {
    for (const auto& r : rows_)
      if (r.contains_hash()) throw alphabet_error("join row " + r.str() + " is not binary");
    while (bit(determined_).has_value()) ++determined_;
  }

  const std::vector<FinString>& rows() const noexcept { return rows_; }

  /// Bit at position k, or nullopt when no row determines it.
  std::optional<int> bit(Natural k) const {
    const auto [j, x] = unpair(k);
    if (j >= rows_.size() || x >= rows_[j].size()) return std::nullopt;
    return rows_[j].bit(x);
  }

  /// Length of the longest fully determined prefix.
  Natural determined_length() const noexcept { return determined_; }

  /// The first `length` positions; fails at the first undetermined one.
  FinString string(Natural length) const {
    if (length > determined_) {
      const auto [j, x] = unpair(determined_);
      throw undetermined_position_error(
          determined_, "join position " + std::to_string(determined_) + " = <" +
                           std::to_string(j) + "," + std::to_string(x) + "> is undetermined");
    }
    FinString out(Alphabet::Binary);
    for (Natural k = 0; k < length; ++k) out.push_back(*bit(k) ? Sym::One : Sym::Zero);
    return out;
  }

  FinString determined_prefix() const { return string(determined_); }

 private:
  std::vector<FinString> rows_;
  Natural determined_ = 0;
};

inline InfiniteJoinOracle join_oracle(std::vector<FinString> rows) {
  return InfiniteJoinOracle(std::move(rows));
}

inline FinString oracle_string(const InfiniteJoinOracle& oracle, Natural length) {
  return oracle.string(length);
}

/// The infinite join of the constant sequence σ, σ, ... restricted to `rows`
/// rows (default |σ|).
inline InfiniteJoinOracle constant_join(const FinString& sigma,
                                        std::optional<std::size_t> rows = std::nullopt) {
  return InfiniteJoinOracle(std::vector<FinString>(rows.value_or(sigma.size()), sigma));
}

}  // namespace pi01
