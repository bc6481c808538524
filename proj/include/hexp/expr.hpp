#pragma once
// Expression layer for user-supplied operator data.  A small arithmetic
// grammar over the engine's generators parses into a printable tree and
// compiles into a symbol:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' int)?
//   atom   := rational | 's' | 'hbar' | 'E'
//           | 't[' index ']' | 'tbar[' index ']' | '(' expr ')'
//
// Whitespace is insignificant.  Rational literals are unsigned "p" or
// "p/q"; signs enter through subtraction and exponent integers.  E is
// the shift symbol: E^m compiles to xi^m, and a negative exponent is
// accepted on E alone.  Multiplication compiles to the circ product in
// source order, so "E*s" and "s*E" differ by the shift identity.

#include <string>
#include <vector>

#include "hexp/symbol.hpp"

namespace hexp {

// Parse tree.  Binary nodes keep their operands in args in source
// order; Pow keeps its base in args[0] and the literal exponent beside
// it.  Parentheses group during parsing and leave no node behind.
struct ExprAst {
  enum class Kind { Number, S, Hbar, E, T, Tbar, Add, Sub, Mul, Pow };
  Kind kind = Kind::Number;
  Rat value = 0;                // Number
  int index = 0;                // T, Tbar
  int exponent = 0;             // Pow
  std::vector<ExprAst> args;    // Add, Sub, Mul: 2; Pow: 1

  bool operator==(const ExprAst& o) const;
};

// Parses source against the grammar above.  Errors carry the 1-based
// character position where parsing stopped.
ExprAst parse_expr(const std::string& source);

// Renders a tree back to source with minimal parentheses.  For every
// tree the parser can produce, parsing the printed form yields the same
// tree again.
std::string print_expr(const ExprAst& ast);

// Evaluates a tree in the symbol algebra at the given truncation:
// s = 1 - u, hbar is the grading shift, E^m is xi^m, and products are
// circ left to right.  Indices outside the configured time families and
// shift powers outside the window are rejected.
HSymbol compile_expr(const ExprAst& ast, const Truncation& tr,
                     const RingConfig& cfg);

// parse_expr then compile_expr.
HSymbol compile_expr(const std::string& source, const Truncation& tr,
                     const RingConfig& cfg);

}  // namespace hexp
