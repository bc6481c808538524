#pragma once
// hbar-graded total symbols of difference operators: finite Laurent data
// in xi per hbar order, coefficients in the scalar ring, plus an optional
// log(xi) slot per order (the symbol of hbar d/ds).  Every symbol carries
// a determinacy interval [det_lo, det_hi]: outside it the coefficients are
// unknown because the finite storage window clipped genuine terms.  All
// operations propagate determinacy conservatively, so a stored coefficient
// inside the interval is always exact.

#include <map>
#include <string>
#include <vector>

#include "hexp/scalar.hpp"

namespace hexp {

struct Truncation {
  int n_hbar = 0;  // highest hbar order kept
  int xi_lo = 0;   // lowest stored xi exponent
  int xi_hi = 0;   // highest stored xi exponent

  bool operator==(const Truncation&) const = default;
};

// +/- infinity sentinels for determinacy bounds.
inline constexpr long long kDetInf = 1LL << 60;

// Saturating addition on extended integers.
long long det_add(long long a, long long b);

enum class Chart { Exact, AtInfinity, AtZero, Window };

class HSymbol {
 public:
  HSymbol() = default;
  HSymbol(const Truncation& tr, const RingConfig& cfg);

  static HSymbol zero(const Truncation& tr, const RingConfig& cfg) {
    return HSymbol(tr, cfg);
  }
  static HSymbol one(const Truncation& tr, const RingConfig& cfg);
  static HSymbol constant(const Truncation& tr, const RingConfig& cfg,
                          const Rat& c);
  // c * xi^m at hbar order n.
  static HSymbol xi_pow(const Truncation& tr, const RingConfig& cfg, int m,
                        int n = 0, const Rat& c = Rat(1));
  // A scalar poly at xi^0, hbar order n.
  static HSymbol from_scalar(const Truncation& tr, const RingConfig& cfg,
                             const ScalarPoly& p, int n = 0);

  const Truncation& trunc() const { return trunc_; }
  const RingConfig& cfg() const { return cfg_; }
  long long det_lo() const { return det_lo_; }
  long long det_hi() const { return det_hi_; }
  Chart chart() const;
  // True when xi^m lies inside both the storage window and the
  // determinacy interval.
  bool determined(int m) const;
  bool det_empty() const { return det_lo_ > det_hi_; }

  // Coefficient of xi^m at hbar order n; Window error when undetermined.
  ScalarPoly coeff(int n, int m) const;
  // Stored-or-zero access without the determinacy check.
  ScalarPoly coeff_or_zero(int n, int m) const;
  const Rat& logxi(int n) const;
  void set_logxi(int n, const Rat& c);
  bool has_logxi() const;

  const std::map<int, ScalarPoly>& order_terms(int n) const;

  // Adds p * xi^m at hbar order n.  Exponents beyond the storage window
  // clip the determinacy interval on that side (hbar overflow is exact
  // truncation and clips nothing).
  void add_term(int n, int m, const ScalarPoly& p);
  // Intersects the determinacy interval with [lo, hi].
  void restrict_det(long long lo, long long hi);

  bool is_zero() const;           // no stored terms, no log slots
  // Highest hbar order with content, or -1 when zero.
  int hbar_order() const;
  // Stored support bounds at all orders; requires nonempty support.
  int supp_lo() const;
  int supp_hi() const;
  bool supp_empty() const;

  HSymbol operator-() const;
  HSymbol& operator+=(const HSymbol& rhs);
  HSymbol& operator-=(const HSymbol& rhs);
  friend HSymbol operator+(HSymbol a, const HSymbol& b) { return a += b; }
  friend HSymbol operator-(HSymbol a, const HSymbol& b) { return a -= b; }

  // Full equality: content, log slots, and determinacy interval.
  bool operator==(const HSymbol& rhs) const;

  // Coefficient-wise operations (determinacy preserved).
  HSymbol mul_rat(const Rat& c) const;
  HSymbol mul_scalar(const ScalarPoly& p) const;
  // Multiplication by hbar^k: shifts the grading up, top orders drop.
  HSymbol mul_hbar(int k) const;
  HSymbol d_s() const;
  HSymbol d_t(int j) const;
  HSymbol d_tbar(int j) const;
  HSymbol truncate_degree(int dt, int dtb) const;

  // d/dxi: xi^m -> m xi^{m-1}, log slot c -> c xi^{-1}.
  HSymbol d_xi() const;
  // Euler operator xi d/dxi: xi^m -> m xi^m, log slot c -> c xi^0.
  HSymbol euler() const;

  // Keeps xi exponents in [lo, hi] (kDetInf bounds for half-lines); the
  // complement becomes certified zero.
  HSymbol project(long long lo, long long hi) const;

  // hbar^0 part as a sigma-slice (content at order 0 of the same shape).
  HSymbol sigma() const;
  // Order-n part as a sigma-slice.
  HSymbol slice(int n) const;
  // True when only order 0 carries content.
  bool is_sigma() const;

  std::string str() const;
  std::string det_str() const;

 private:
  void normalize();
  friend HSymbol circ(const HSymbol& a, const HSymbol& b);
  friend HSymbol ptmul(const HSymbol& a, const HSymbol& b);
  friend HSymbol poisson(const HSymbol& a, const HSymbol& b);
  friend HSymbol antideriv_xi(const HSymbol& a, Rat* log_coeff);

  Truncation trunc_;
  RingConfig cfg_;
  std::vector<std::map<int, ScalarPoly>> orders_;
  std::vector<Rat> logxi_;
  long long det_lo_ = -kDetInf;
  long long det_hi_ = kDetInf;
};

void require_same_shape(const HSymbol& a, const HSymbol& b, const char* where);
// Requires content confined to hbar order 0.
void require_sigma(const HSymbol& a, const char* where);

// The circ product: per hbar order r the slice is
//   sum_{n+p+q=r} (1/n!) (xi d/dxi)^n a_p * d_s^n b_q
// evaluated coefficientwise.  Operands must be log-free.
HSymbol circ(const HSymbol& a, const HSymbol& b);

// Plain commutative product (no hbar corrections); used for sigma-level
// formulas.  Operands must be log-free.
HSymbol ptmul(const HSymbol& a, const HSymbol& b);

// Poisson bracket {a, b} = xi (d_xi a d_s b - d_s a d_xi b) on sigma
// slices.  Log slots with constant coefficients are supported and the
// result is always log-free.
HSymbol poisson(const HSymbol& a, const HSymbol& b);

// Termwise xi-antiderivative of a sigma slice: xi^{m-1} -> xi^m / m for
// m != 0; the xi^{-1} coefficient must be a rational constant and is
// returned through log_coeff (the log xi slot of the primitive).  The
// xi^0 coefficient of the result is fixed to zero.
HSymbol antideriv_xi(const HSymbol& a, Rat* log_coeff);

// circ-power with integer exponent; negative exponents invert first.
HSymbol circ_pow(const HSymbol& a, int n);

// circ-inverse.  Requires a certified leading end: a single-monomial unit
// coefficient at the top (det_hi infinite) or bottom (det_lo infinite) of
// the hbar^0 support.
HSymbol invert(const HSymbol& a);

// Pointwise reciprocal of a sigma slice (commutative product), with the
// same leading-end requirements as invert.
HSymbol invert_sigma(const HSymbol& a);

// Copies a onto a different truncation.  Dropping high hbar orders is
// exact; the xi window may only grow.
HSymbol with_truncation(const HSymbol& a, const Truncation& tr2);

// Comparison on the common determined region (window, det intersection,
// orders, log slots), with time degrees restricted to [0, dt] x [0, dtb].
// Returns the number of compared (order, exponent) cells through
// `cells` when non-null; mismatch descriptions are appended to `report`
// when non-null.  dt / dtb default to no restriction.
bool equal_on_overlap(const HSymbol& a, const HSymbol& b,
                      std::string* report = nullptr, long* cells = nullptr,
                      int dt = -1, int dtb = -1);

}  // namespace hexp
