#pragma once

// Finite strings over {0,1} and {0,1,#}, prefix algebra, and Cantor pairing.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace pi01 {

using Natural = std::uint64_t;

/// Base class for every error raised by the workbench library.
class workbench_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class alphabet_error : public workbench_error {
 public:
  using workbench_error::workbench_error;
};

enum class Sym : std::uint8_t { Zero, One, Hash };
enum class Alphabet : std::uint8_t { Binary, Ternary };

constexpr char sym_char(Sym s) noexcept {
  switch (s) {
    case Sym::Zero:
      return '0';
    case Sym::One:
      return '1';
    case Sym::Hash:
      return '#';
  }
  return '?';
}

inline Sym char_sym(char c) {
  switch (c) {
    case '0':
      return Sym::Zero;
    case '1':
      return Sym::One;
    case '#':
      return Sym::Hash;
    default:
      throw alphabet_error(std::string("not a string symbol: '") + c + "'");
  }
}

inline const char* alphabet_name(Alphabet a) noexcept {
  return a == Alphabet::Binary ? "binary" : "ternary";
}

/// A finite string over the binary or ternary alphabet.
///
/// Symbols are stored as the characters '0', '1', '#'. The natural ordering is
/// lexicographic on symbols, so all extensions of a string form a contiguous
/// range directly after it in any ordered container; use `LengthLexLess` when
/// "least" means shortest-first.
class FinString {
 public:
  FinString() = default;
  explicit FinString(Alphabet alphabet) : alphabet_(alphabet) {}

  /// Parses "0", "1", "#" characters; "" and "ε" both denote the empty string.
  FinString(std::string_view text, Alphabet alphabet) : alphabet_(alphabet) {
    if (text == "ε") return;
    chars_.reserve(text.size());
    for (char c : text) push_back(char_sym(c));
  }

  static FinString binary(std::string_view text) { return FinString(text, Alphabet::Binary); }
  static FinString ternary(std::string_view text) { return FinString(text, Alphabet::Ternary); }

  /// Ternary iff the text contains '#'.
  static FinString parse(std::string_view text) {
    return FinString(text, text.find('#') == std::string_view::npos ? Alphabet::Binary
                                                                    : Alphabet::Ternary);
  }

  static FinString repeat(Sym s, std::size_t count, Alphabet alphabet) {
    FinString out(alphabet);
    for (std::size_t i = 0; i < count; ++i) out.push_back(s);
    return out;
  }

  Alphabet alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return chars_.size(); }
  bool empty() const noexcept { return chars_.empty(); }

  Sym operator[](std::size_t i) const { return char_sym(chars_[i]); }
  Sym at(std::size_t i) const {
    if (i >= chars_.size()) throw std::out_of_range("FinString::at");
    return (*this)[i];
  }
  Sym back() const { return char_sym(chars_.back()); }

  /// The bit at position i; '#' is not a bit.
  int bit(std::size_t i) const {
    switch (chars_.at(i)) {
      case '0':
        return 0;
      case '1':
        return 1;
      default:
        throw alphabet_error("position " + std::to_string(i) + " of " + str() + " holds '#'");
    }
  }

  void push_back(Sym s) {
    if (s == Sym::Hash && alphabet_ == Alphabet::Binary)
      throw alphabet_error("'#' in a binary string");
    chars_.push_back(sym_char(s));
  }
  void pop_back() { chars_.pop_back(); }

  FinString child(Sym s) const {
    FinString out = *this;
    out.push_back(s);
    return out;
  }

  /// σ↾n, the initial segment of length min(n, |σ|).
  FinString prefix(std::size_t n) const {
    FinString out(alphabet_);
    out.chars_ = chars_.substr(0, std::min(n, chars_.size()));
    return out;
  }

  /// The string with the first n symbols removed.
  FinString suffix_from(std::size_t n) const {
    FinString out(alphabet_);
    if (n < chars_.size()) out.chars_ = chars_.substr(n);
    return out;
  }

  /// Same symbols under another alphabet; fails if '#' would enter a binary string.
  FinString as(Alphabet alphabet) const {
    if (alphabet == Alphabet::Binary && contains_hash())
      throw alphabet_error(str() + " is not a binary string");
    FinString out(alphabet);
    out.chars_ = chars_;
    return out;
  }

  bool contains_hash() const noexcept { return chars_.find('#') != std::string::npos; }

  /// σ ⊆ τ (initial segment, equality included).
  bool is_prefix_of(const FinString& tau) const noexcept {
    return chars_.size() <= tau.chars_.size() &&
           std::equal(chars_.begin(), chars_.end(), tau.chars_.begin());
  }
  bool is_proper_prefix_of(const FinString& tau) const noexcept {
    return chars_.size() < tau.chars_.size() && is_prefix_of(tau);
  }

  /// Position of the first disagreement, or nullopt when compatible.
  std::optional<std::size_t> first_disagreement(const FinString& tau) const noexcept {
    const std::size_t m = std::min(chars_.size(), tau.chars_.size());
    for (std::size_t i = 0; i < m; ++i)
      if (chars_[i] != tau.chars_[i]) return i;
    return std::nullopt;
  }

  bool compatible_with(const FinString& tau) const noexcept {
    return !first_disagreement(tau).has_value();
  }

  /// Symbols as characters; the empty string is "".
  const std::string& text() const noexcept { return chars_; }

  /// Display form; the empty string renders as "ε".
  std::string str() const { return chars_.empty() ? std::string("ε") : chars_; }

  // Identity is the symbol sequence; the alphabet is a type tag, so a binary
  // string equals the ternary string with the same symbols.
  friend bool operator==(const FinString& a, const FinString& b) noexcept {
    return a.chars_ == b.chars_;
  }
  friend std::strong_ordering operator<=>(const FinString& a, const FinString& b) noexcept {
    const int c = a.chars_.compare(b.chars_);
    return c < 0 ? std::strong_ordering::less
                 : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  std::string chars_;
  Alphabet alphabet_ = Alphabet::Binary;
};

/// Shorter strings first, then lexicographic with 0 < 1 < #.
struct LengthLexLess {
  static int rank(char c) noexcept { return c == '0' ? 0 : c == '1' ? 1 : 2; }
  bool operator()(const FinString& a, const FinString& b) const noexcept {
    if (a.size() != b.size()) return a.size() < b.size();
    const auto& x = a.text();
    const auto& y = b.text();
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] != y[i]) return rank(x[i]) < rank(y[i]);
    return false;
  }
};

inline bool length_lex_less(const FinString& a, const FinString& b) noexcept {
  return LengthLexLess{}(a, b);
}

/// σ*τ. A ternary σ may be followed by a binary τ; the reverse is rejected.
inline FinString concat(const FinString& sigma, const FinString& tau) {
  if (sigma.alphabet() == Alphabet::Binary && tau.alphabet() == Alphabet::Ternary)
    throw alphabet_error("cannot append ternary " + tau.str() + " to binary " + sigma.str());
  FinString out = sigma;
  for (std::size_t i = 0; i < tau.size(); ++i) out.push_back(tau[i]);
  return out;
}

inline bool compatible(const FinString& sigma, const FinString& tau) noexcept {
  return sigma.compatible_with(tau);
}

// Cantor pairing ⟨i,j⟩ = (i+j)(i+j+1)/2 + j.

inline Natural pair(Natural i, Natural j) {
  const unsigned __int128 d = static_cast<unsigned __int128>(i) + j;
  // d below 2^64 keeps d(d+1) inside 128 bits
  const bool fits = d <= UINT64_MAX && d * (d + 1) / 2 + j <= UINT64_MAX;
  if (!fits)
    throw std::overflow_error("pair(" + std::to_string(i) + "," + std::to_string(j) +
                              ") exceeds 64 bits");
  return static_cast<Natural>(d * (d + 1) / 2 + j);
}

inline std::pair<Natural, Natural> unpair(Natural code) {
  // w = largest diagonal with w(w+1)/2 <= code
  auto tri = [](unsigned __int128 w) { return w * (w + 1) / 2; };
  unsigned __int128 lo = 0, hi = std::uint64_t{1} << 33;
  while (lo < hi) {
    const unsigned __int128 mid = (lo + hi + 1) / 2;
    if (tri(mid) <= code) lo = mid; else hi = mid - 1;
  }
  const Natural w = static_cast<Natural>(lo);
  const Natural j = code - static_cast<Natural>(tri(lo));
  return {w - j, j};
}

}  // namespace pi01

template <>
struct std::hash<pi01::FinString> {
  std::size_t operator()(const pi01::FinString& s) const noexcept {
    return std::hash<std::string>{}(s.text());
  }
};
