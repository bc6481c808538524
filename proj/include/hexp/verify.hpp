#pragma once
// End-to-end checks on solved dressing data.  The Lax and Orlov-Schulman
// operators are rebuilt through the adjoint dressing, and the flow
// equations, the canonical commutation relation, the factorization
// conditions, and the dispersionless limits are tested coefficientwise.
// Every line records the cells it certified; coefficients outside the
// window, outside the determinacy interval, or beyond the derivative
// trust bound are counted as skipped, never asserted.

#include <string>
#include <vector>

#include "hexp/rhsolver.hpp"
#include "hexp/symbol.hpp"

namespace hexp {

// Dressed operators.  B[n-1] = (L^n)_{>=0} and Bbar[n-1] =
// (Lbar^{-n})_{<=-1} generate the t_n and tbar_n flows.  The source
// triple rides along so the factorization check can re-dress data pairs
// through the same generators.
struct LaxPack {
  Truncation tr;
  RingConfig cfg;
  DressingTriple triple;
  HSymbol L, Lbar, M, Mbar;
  std::vector<HSymbol> B, Bbar;
};

// Builds L, Lbar, M, Mbar and the first n_flows projected powers.  The
// dressed operators must come out log-free (a nonzero log slot would
// mean the generators fail their shape conventions); violations raise
// Check errors.
LaxPack dress_lax(const DressingTriple& triple, int n_flows);

// One certified identity.  cells counts coefficient slots asserted to
// vanish; skipped counts in-window slots that could not be certified
// (undetermined, or residual content beyond the derivative trust bound).
// detail holds the first offending slot on failure, or the reason when a
// whole line is vacuous.
struct CheckLine {
  std::string battery;
  std::string equation;
  bool pass = true;
  long long cells = 0;
  long long skipped = 0;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckLine> lines;

  bool all_pass() const;
  long long total_cells() const;
  std::string str() const;
};

// Flow equations hbar dO/dt_n = [B_n, O] and hbar dO/dtbar_n =
// [Bbar_n, O] for O in {L, Lbar, M, Mbar}, n = 1..n_max.  A t-derivative
// is only trusted one time degree below the ring cap, so each flow line
// asserts the residual on the reduced degree bound; directions the ring
// cannot see (index beyond the variable count, or a zero degree cap)
// produce vacuous lines.
CheckReport check_lax(const LaxPack& pack, int n_max);

// [L, M] - hbar L and [Lbar, Mbar] - hbar Lbar, plus their order-0
// shadows {sigma L, sigma M} = sigma L under the Poisson bracket.
CheckReport check_ccr(const LaxPack& pack);

// The factorization condition: each data pair is dressed through its own
// chart, Ad(W e^{zeta/hbar})(f, g) against Ad(Wbar e^{zetabar/hbar})
// (fbar, gbar), and the two sides must agree.  Composition is always
// realized through the adjoint action, never by direct substitution.
CheckReport check_rh(const LaxPack& pack, const RHData& data);

// Order-0 slices: d(sigma O)/dt_n = {sigma B_n, sigma O} for O in
// {L, Lbar}, with the flow generators rebuilt from plain sigma-level
// products rather than sliced from the graded ones.
CheckReport check_dispersionless(const LaxPack& pack);

// One cell of the string-datum coefficient diagnostic.  m >= 1 rows read
// X_bar[i] at xi^m, which must have the shape c * t_m * u^{m-i}; the
// m = 0 column reads phi_i (the log coefficient at i = 1, a single
// u^{1-i} term for i >= 2).  Each extracted value is compared against
// the repaired recursion and, where one exists, a closed-form table row;
// disagreements are reported, never fatal.
struct CnmLine {
  int i = 0;
  int m = 0;
  bool shape_ok = true;
  Rat solver = 0;
  Rat recursion = 0;
  bool has_closed = false;
  Rat closed = 0;
  std::string note;

  bool match_recursion() const { return shape_ok && solver == recursion; }
  bool match_closed() const {
    return shape_ok && (!has_closed || solver == closed);
  }
};

struct CnmReport {
  int i_max = 0;
  int m_max = 0;
  std::vector<CnmLine> lines;

  bool extraction_ok() const;  // every read slice had the Ansatz shape
  int recursion_mismatches() const;
  int closed_mismatches() const;
  std::string str() const;
};

// The repaired coefficient recursions behind the diagnostic:
//   c_{i,m} = (1/i) sum_{j=0}^{i-1} (-1)^{i-j} C(m-j+1, i-j+1) c_{j,m}
// from c_{0,m} = 1, and
//   c_{i,0} = (1/(1-i)) (1/(i+1) - c_{1,0}/i
//             - sum_{j=2}^{i-1} (-1)^{i-j} C(1-j, i-j+1) c_{j,0})
// from c_{1,0} = 1/2.
Rat cnm_recursion(int i, int m);
Rat cn0_recursion(int i);

// Extracts c_{i,m} for i <= i_max from string-datum solver output and
// fills the comparison table.  m runs to min(t_vars, xi_hi); cells the
// window left undetermined are flagged in their note and skipped.
CnmReport check_cnm_tables(const DressingTriple& triple, int i_max);

}  // namespace hexp
