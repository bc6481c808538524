#pragma once
// Order-by-order solution of the operator factorization problem for the
// dressing data.  Both charts dress their data pair through the current
// partial solution; the order-i discrepancy is integrated in xi and in s
// through two independent routes, split by shift sign, and transported
// back through the inverse tilde maps.

#include <string>
#include <vector>

#include "hexp/adjoint.hpp"
#include "hexp/symbol.hpp"

namespace hexp {

// Input data: two canonical pairs with [f, g] = hbar f, and the
// order-zero seed of the dressing.
struct RHData {
  Truncation tr;
  RingConfig cfg;
  HSymbol f, g, fbar, gbar;  // exact data symbols
  HSymbol x0, xbar0;         // sigma-slice seeds; x0 shifts < 0, xbar0 > 0
  ScalarPoly phi0;

  RHData(const Truncation& t, const RingConfig& c)
      : tr(t),
        cfg(c),
        f(t, c),
        g(t, c),
        fbar(t, c),
        gbar(t, c),
        x0(t, c),
        xbar0(t, c),
        phi0(ScalarPoly::zero(c)) {}
};

// Solved dressing data as sigma slices per hbar order.  The log slot of
// Xbar[i] carries the constant alphabar_i; the unbar constants are fixed
// to zero by convention.
struct DressingTriple {
  Truncation tr;
  RingConfig cfg;
  std::vector<HSymbol> X;
  std::vector<HSymbol> Xbar;
  HScalar phi;
  std::vector<Rat> alphabar;

  DressingTriple(const Truncation& t, const RingConfig& c)
      : tr(t),
        cfg(c),
        X(t.n_hbar + 1, HSymbol(t, c)),
        Xbar(t.n_hbar + 1, HSymbol(t, c)),
        phi(hscalar_zero(c, t.n_hbar)),
        alphabar(t.n_hbar + 1, Rat(0)) {}

  // sum_i hbar^i X_i as one symbol (and the bar mirror).
  HSymbol x_total() const;
  HSymbol xbar_total() const;
};

struct StepReport {
  int order = 0;
  long induction_cells = 0;
  long compat_cells = 0;
  long route_cells = 0;
  Rat alphabar = 0;
};

struct SolveReport {
  std::string seed_notes;
  std::vector<StepReport> steps;
};

// The c = 1 string data: f = E, g = s, fbar = (1 - s - hbar) E,
// gbar = s, with the standard seed for Xbar and phi.
RHData c1_string_data(const Truncation& tr, const RingConfig& cfg);

// Validates the seed: window fit, shape conventions, the operator-level
// relations [f, g] = hbar f and [fbar, gbar] = hbar fbar, and agreement
// of the two dispersionless charts.
void verify_seed(const RHData& data, std::string* notes = nullptr);

// Runs the recursion up to tr.n_hbar.  Throws Window when the xi window
// cannot certify the required cells, Check when the data is inconsistent.
DressingTriple solve_rh(const RHData& data, SolveReport* report = nullptr);

}  // namespace hexp
