#pragma once
// Independent difference-operator model, used as a cross-check oracle for
// the symbol calculus.  An operator sum_m a_m(hbar, s) E^m with
// E = e^{hbar d/ds} is stored by shift m.  Multiplication uses the shift
// law E^m b(s) = b(s + m hbar) E^m, where the coefficient shift is done
// by exact substitution u -> u - m hbar, l -> l + log(1 - m hbar / u)
// expanded to the hbar truncation; the symbol product is never consulted.

#include <map>
#include <vector>

#include "hexp/symbol.hpp"

namespace hexp {

class DiffOp {
 public:
  DiffOp(const Truncation& tr, const RingConfig& cfg);

  // Requires a fully determined, log-free symbol.
  static DiffOp from_symbol(const HSymbol& a);

  const Truncation& trunc() const { return trunc_; }
  const RingConfig& cfg() const { return cfg_; }

  // Adds p * hbar^n * E^m.  The shift must fit the xi window; hbar
  // overflow truncates exactly.
  void add_term(int m, int n, const ScalarPoly& p);

  DiffOp operator-() const;
  DiffOp& operator+=(const DiffOp& rhs);
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a += -b; }
  friend DiffOp operator*(const DiffOp& a, const DiffOp& b);

  bool is_zero() const;
  HSymbol total_symbol() const;

  // shift -> hbar slots, each slot vector of size n_hbar + 1.
  const std::map<int, std::vector<ScalarPoly>>& terms() const {
    return terms_;
  }

 private:
  Truncation trunc_;
  RingConfig cfg_;
  std::map<int, std::vector<ScalarPoly>> terms_;  // shift -> hbar slots
};

// The coefficient substitution b(s) -> b(s + m hbar) as an hbar-graded
// vector (slot i is the hbar^i part), exact to the truncation order.
std::vector<ScalarPoly> shift_coeff(const ScalarPoly& p, int m, int n_hbar);

}  // namespace hexp
