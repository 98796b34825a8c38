#pragma once

// Hand-written seed functionals used by the samples, tests and CLI.

#include <string>

#include "pi01/machine.hpp"

namespace pi01::programs {

/// Diverges on every input.
inline Program diverge() { return Program::assemble("loop\n"); }

/// Ψ(σ;n) = 0 with use 0, in one step.
inline Program constant_zero() { return Program::assemble("halt r1\n"); }

/// Ψ(σ;n) = σ(n).
inline Program identity_oracle() {
  return Program::assemble(
      "query r1 r0\n"
      "halt r1\n");
}

/// Ψ(σ;n) = 1 - σ(n).
inline Program bit_flip() {
  return Program::assemble(
      "      query r1 r0\n"
      "      jz r1 one\n"
      "      halt r2\n"
      "one:  inc r2\n"
      "      halt r2\n");
}

/// Ψ(σ;n) = σ(0) for every n.
inline Program first_bit() {
  return Program::assemble(
      "query r1 r2\n"
      "halt r1\n");
}

/// Reads oracle bit 0, then outputs 0; converges to 0 on every follower once
/// the oracle determines one bit.
inline Program zero_after_query() {
  return Program::assemble(
      "query r1 r2\n"
      "halt r2\n");
}

/// Oracle-free lookup of a fixed finite string: Ψ(σ;n) = x(n) for n < |x|,
/// divergent beyond.
inline std::string x_lookup_text(const FinString& x) {
  std::string text = "      inc r2\n";
  for (std::size_t k = 0; k < x.size(); ++k) {
    text += "      jz r0 " + std::string(x.bit(k) ? "one" : "zero") + "\n";
    text += "      dec r0\n";
  }
  text +=
      "      loop\n"
      "zero: halt r1\n"
      "one:  halt r2\n";
  return text;
}

inline Program x_lookup(const FinString& x) { return Program::assemble(x_lookup_text(x)); }

}  // namespace pi01::programs
