#pragma once

// Oracle register machines: the effective enumeration {Ψ_e} of Turing
// functionals, with step-bounded evaluation and use tracking.
//
// Instruction set (registers r0, r1, ... hold naturals, r0 holds the input):
//
//   inc r          r := r + 1
//   dec r          r := max(r - 1, 0)
//   jz r L         if r = 0 jump to instruction L
//   query d a      d := oracle bit at position r_a (out of range: undefined)
//   halt r         stop with output r
//   loop           diverge
//
// Running off the end of the program diverges. One executed instruction is
// one step.
//
// Goedel numbering: index e maps to the bit string w with binary(e + 1) = 1w.
// w is read as a stream of instructions: a 3-bit opcode (inc=000, dec=001,
// jz=010, query=011, halt=100, loop=101; 110 and 111 also mean loop)
// followed by its operands in Elias-gamma code of (value + 1). A truncated
// trailing instruction, or an operand of 62 bits or more, decodes to loop.
// Every natural therefore names a program, and `encode` is a right inverse
// of `decode`.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pi01/strings.hpp"
#include "pi01/tree.hpp"

namespace pi01 {

using Index = boost::multiprecision::cpp_int;

class assembly_error : public workbench_error {
 public:
  using workbench_error::workbench_error;
};

enum class Op : std::uint8_t { Inc = 0, Dec = 1, Jz = 2, Query = 3, Halt = 4, Loop = 5 };

struct Instruction {
  Op op = Op::Loop;
  Natural a = 0;  // register (inc, dec, jz, halt) or destination (query)
  Natural b = 0;  // jump target (jz) or address register (query)

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Halted {
  Natural value = 0;
  Natural use = 0;  // 1 + largest oracle position queried, 0 if none
  Natural steps = 0;

  friend bool operator==(const Halted&, const Halted&) = default;
};

/// Outcome of Ψ_e(σ;n)[s]: Halted, or Running (no convergence within the
/// step budget on this oracle string).
struct EvalResult {
  std::optional<Halted> halted;

  bool is_halted() const noexcept { return halted.has_value(); }
  bool halted_with(Natural v) const noexcept { return halted && halted->value == v; }

  static EvalResult running() { return {}; }
  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

inline constexpr Natural kOperandLimit = Natural{1} << 62;

class Program {
 public:
  Program() = default;
  explicit Program(std::vector<Instruction> code) : code_(std::move(code)) { compile(); }

  const std::vector<Instruction>& code() const noexcept { return code_; }
  std::size_t size() const noexcept { return code_.size(); }

  static Program decode(const Index& e) {
    BitReader in(e);
    std::vector<Instruction> code;
    while (!in.done()) {
      Instruction ins;
      auto opcode = in.read_bits(3);
      if (!opcode) {
        code.push_back({Op::Loop});
        break;
      }
      bool ok = true;
      auto operand = [&]() -> Natural {
        auto v = in.read_gamma();
        if (!v) ok = false;
        return v.value_or(0);
      };
      switch (*opcode) {
        case 0: ins = {Op::Inc, operand()}; break;
        case 1: ins = {Op::Dec, operand()}; break;
        case 2: {
          const Natural r = operand();
          const Natural target = ok ? operand() : 0;
          ins = {Op::Jz, r, target};
          break;
        }
        case 3: {
          const Natural d = operand();
          const Natural addr = ok ? operand() : 0;
          ins = {Op::Query, d, addr};
          break;
        }
        case 4: ins = {Op::Halt, operand()}; break;
        default: ins = {Op::Loop}; break;
      }
      if (!ok) {
        code.push_back({Op::Loop});
        break;
      }
      code.push_back(ins);
    }
    return Program(std::move(code));
  }

  Index encode() const {
    std::string bits = "1";
    auto gamma = [&](Natural v) {
      if (v >= kOperandLimit) throw assembly_error("operand " + std::to_string(v) + " too large");
      const Natural x = v + 1;
      int width = 0;
      while ((x >> width) > 1) ++width;
      bits.append(static_cast<std::size_t>(width), '0');
      for (int k = width; k >= 0; --k) bits.push_back(((x >> k) & 1) ? '1' : '0');
    };
    for (const auto& ins : code_) {
      const unsigned op = static_cast<unsigned>(ins.op);
      for (int k = 2; k >= 0; --k) bits.push_back(((op >> k) & 1) ? '1' : '0');
      switch (ins.op) {
        case Op::Inc:
        case Op::Dec:
        case Op::Halt: gamma(ins.a); break;
        case Op::Jz:
        case Op::Query:
          gamma(ins.a);
          gamma(ins.b);
          break;
        case Op::Loop: break;
      }
    }
    Index e = 0;
    for (char c : bits) e = (e << 1) | (c == '1' ? 1 : 0);
    return e - 1;
  }

  /// Parses the one-instruction-per-line text form. Labels are `name:`
  /// lines; jump targets may be labels or instruction numbers. Comments
  /// start with ';'.
  static Program assemble(std::string_view text) {
    struct Line {
      std::vector<std::string> words;
      std::size_t number;
    };
    std::vector<Line> lines;
    std::map<std::string, Natural> labels;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      if (auto c = raw.find(';'); c != std::string::npos) raw.erase(c);
      std::istringstream ws(raw);
      std::vector<std::string> words;
      for (std::string w; ws >> w;) {
        std::transform(w.begin(), w.end(), w.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        words.push_back(w);
      }
      while (!words.empty() && words.front().back() == ':') {
        std::string name = words.front().substr(0, words.front().size() - 1);
        if (name.empty() || !labels.emplace(name, lines.size()).second)
          throw assembly_error("line " + std::to_string(lineno) + ": bad or duplicate label '" +
                               name + "'");
        words.erase(words.begin());
      }
      if (!words.empty()) lines.push_back({std::move(words), lineno});
    }

    auto number = [](const std::string& w, std::size_t ln) -> Natural {
      Natural v = 0;
      auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
      if (ec != std::errc() || p != w.data() + w.size())
        throw assembly_error("line " + std::to_string(ln) + ": expected a number, got '" + w +
                             "'");
      return v;
    };
    auto reg = [&](const std::string& w, std::size_t ln) -> Natural {
      if (w.size() < 2 || w[0] != 'r')
        throw assembly_error("line " + std::to_string(ln) + ": expected a register, got '" + w +
                             "'");
      return number(w.substr(1), ln);
    };
    auto target = [&](const std::string& w, std::size_t ln) -> Natural {
      if (auto it = labels.find(w); it != labels.end()) return it->second;
      if (!w.empty() && std::isdigit(static_cast<unsigned char>(w[0]))) return number(w, ln);
      throw assembly_error("line " + std::to_string(ln) + ": unknown label '" + w + "'");
    };
    auto arity = [](const Line& l, std::size_t n) {
      if (l.words.size() != n + 1)
        throw assembly_error("line " + std::to_string(l.number) + ": '" + l.words[0] +
                             "' takes " + std::to_string(n) + " operand(s)");
    };

    std::vector<Instruction> code;
    for (const auto& l : lines) {
      const auto& op = l.words[0];
      if (op == "inc") {
        arity(l, 1);
        code.push_back({Op::Inc, reg(l.words[1], l.number)});
      } else if (op == "dec") {
        arity(l, 1);
        code.push_back({Op::Dec, reg(l.words[1], l.number)});
      } else if (op == "jz") {
        arity(l, 2);
        code.push_back({Op::Jz, reg(l.words[1], l.number), target(l.words[2], l.number)});
      } else if (op == "query") {
        arity(l, 2);
        code.push_back({Op::Query, reg(l.words[1], l.number), reg(l.words[2], l.number)});
      } else if (op == "halt") {
        arity(l, 1);
        code.push_back({Op::Halt, reg(l.words[1], l.number)});
      } else if (op == "loop") {
        arity(l, 0);
        code.push_back({Op::Loop});
      } else {
        throw assembly_error("line " + std::to_string(l.number) + ": unknown instruction '" + op +
                             "'");
      }
      const auto& ins = code.back();
      if (ins.a >= kOperandLimit || ins.b >= kOperandLimit)
        throw assembly_error("line " + std::to_string(l.number) + ": operand too large");
    }
    return Program(std::move(code));
  }

  std::string disassemble() const {
    std::string out;
    for (const auto& ins : code_) {
      switch (ins.op) {
        case Op::Inc: out += "inc r" + std::to_string(ins.a); break;
        case Op::Dec: out += "dec r" + std::to_string(ins.a); break;
        case Op::Jz: out += "jz r" + std::to_string(ins.a) + " " + std::to_string(ins.b); break;
        case Op::Query:
          out += "query r" + std::to_string(ins.a) + " r" + std::to_string(ins.b);
          break;
        case Op::Halt: out += "halt r" + std::to_string(ins.a); break;
        case Op::Loop: out += "loop"; break;
      }
      out += '\n';
    }
    return out;
  }

  /// Ψ(σ;n)[s]. Running when n > s, when a query leaves σ, when the step
  /// budget s runs out, or on divergence.
  EvalResult run(const FinString& oracle, Natural n, Natural s) const {
    if (n > s) return EvalResult::running();
    if (oracle.contains_hash())
      throw alphabet_error("oracle " + oracle.str() + " is not a binary string");
    std::vector<Natural> regs(slot_count_, 0);
    regs[0] = n;
    const auto& bits = oracle.text();
    std::size_t pc = 0;
    Natural steps = 0;
    Natural use = 0;
    while (pc < compiled_.size() && steps < s) {
      const Slotted& ins = compiled_[pc];
      ++steps;
      switch (ins.op) {
        case Op::Inc:
          ++regs[ins.a];
          ++pc;
          break;
        case Op::Dec:
          if (regs[ins.a] > 0) --regs[ins.a];
          ++pc;
          break;
        case Op::Jz:
          pc = regs[ins.a] == 0 ? ins.b : pc + 1;
          break;
        case Op::Query: {
          const Natural pos = regs[ins.b];
          if (pos >= bits.size()) return EvalResult::running();
          regs[ins.a] = bits[pos] == '1' ? 1 : 0;
          use = std::max(use, pos + 1);
          ++pc;
          break;
        }
        case Op::Halt:
          return EvalResult{Halted{regs[ins.a], use, steps}};
        case Op::Loop:
          return EvalResult::running();
      }
    }
    return EvalResult::running();
  }

  /// Appends k copies of `loop`. Only reachable by running off the end, which
  /// already diverges, so the padded program computes the same functional.
  Program padded(std::size_t k) const {
    auto code = code_;
    code.insert(code.end(), k, Instruction{Op::Loop});
    return Program(std::move(code));
  }

  friend bool operator==(const Program& a, const Program& b) { return a.code_ == b.code_; }

 private:
  struct Slotted {
    Op op;
    std::size_t a;
    std::size_t b;
  };

  class BitReader {
   public:
    explicit BitReader(const Index& e) {
      Index v = e + 1;
      std::string raw;
      while (v > 0) {
        raw.push_back((v & 1) != 0 ? '1' : '0');
        v >>= 1;
      }
      std::reverse(raw.begin(), raw.end());
      bits_ = raw.substr(1);
    }
    bool done() const noexcept { return pos_ >= bits_.size(); }
    std::optional<unsigned> read_bits(int n) {
      if (pos_ + static_cast<std::size_t>(n) > bits_.size()) return std::nullopt;
      unsigned v = 0;
      for (int k = 0; k < n; ++k) v = (v << 1) | (bits_[pos_++] == '1' ? 1u : 0u);
      return v;
    }
    std::optional<Natural> read_gamma() {
      std::size_t zeros = 0;
      while (pos_ < bits_.size() && bits_[pos_] == '0') {
        ++zeros;
        ++pos_;
      }
      if (pos_ + zeros + 1 > bits_.size() || zeros >= 62) {
        pos_ = bits_.size();
        return std::nullopt;
      }
      Natural x = 0;
      for (std::size_t k = 0; k <= zeros; ++k) x = (x << 1) | (bits_[pos_++] == '1' ? 1 : 0);
      return x - 1;
    }

   private:
    std::string bits_;
    std::size_t pos_ = 0;
  };

  void compile() {
    // Registers are renamed to dense slots; r0 keeps slot 0.
    std::map<Natural, std::size_t> slots{{0, 0}};
    auto slot = [&](Natural r) {
      auto [it, fresh] = slots.emplace(r, slots.size());
      return it->second;
    };
    compiled_.clear();
    compiled_.reserve(code_.size());
    for (const auto& ins : code_) {
      Slotted s{ins.op, 0, 0};
      switch (ins.op) {
        case Op::Inc:
        case Op::Dec:
        case Op::Halt: s.a = slot(ins.a); break;
        case Op::Jz:
          s.a = slot(ins.a);
          s.b = ins.b < code_.size() ? static_cast<std::size_t>(ins.b) : code_.size();
          break;
        case Op::Query:
          s.a = slot(ins.a);
          s.b = slot(ins.b);
          break;
        case Op::Loop: break;
      }
      compiled_.push_back(s);
    }
    slot_count_ = slots.size();
  }

  std::vector<Instruction> code_;
  std::vector<Slotted> compiled_;
  std::size_t slot_count_ = 1;
};

inline EvalResult eval(const Program& program, const FinString& oracle, Natural n, Natural s) {
  return program.run(oracle, n, s);
}

inline EvalResult eval(const Index& e, const FinString& oracle, Natural n, Natural s) {
  return Program::decode(e).run(oracle, n, s);
}

/// The longest ρ, |ρ| <= s, with Ψ(∅;i)[s] = ρ(i) ∈ {0,1} for all i < |ρ|.
inline FinString computable_prefix(const Program& program, Natural s) {
  FinString rho(Alphabet::Binary);
  const FinString empty;
  for (Natural i = 0; i < s; ++i) {
    auto r = program.run(empty, i, s);
    if (!r.halted || r.halted->value > 1) break;
    rho.push_back(r.halted->value == 0 ? Sym::Zero : Sym::One);
  }
  return rho;
}

inline FinString computable_prefix(const Index& e, Natural s) {
  return computable_prefix(Program::decode(e), s);
}

/// K_s = { e <= s : Ψ_e(∅;e) halts within s steps }.
struct HaltingApprox {
  Stage stage = 0;
  std::set<Natural> members;
};

inline HaltingApprox halting_approx(Natural s) {
  HaltingApprox out{s, {}};
  const FinString empty;
  for (Natural e = 0; e <= s; ++e)
    if (Program::decode(Index(e)).run(empty, e, s).is_halted()) out.members.insert(e);
  return out;
}

inline std::string to_string(const Index& e) { return e.str(); }

inline Index parse_index(std::string_view text) {
  if (text.empty() || !std::all_of(text.begin(), text.end(),
                                   [](unsigned char c) { return std::isdigit(c); }))
    throw assembly_error("not a program index: '" + std::string(text) + "'");
  return Index(std::string(text));
}

}  // namespace pi01
