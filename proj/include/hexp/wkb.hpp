#pragma once
// Conversion between exponential dressing generators and WKB phases: the
// total symbol of e^{X/hbar} is again an exponential e^{S/hbar} of a power
// series in xi^{-1}, and conversely.  Both directions run a bivariate
// recursion on the doubled ring (s, s', xi, xi'), diagonal-evaluated at the
// end of every cell.  The bar side is the mirror with positive shifts and
// an additive e^{phi/hbar} prefactor.

#include <vector>

#include "hexp/rhsolver.hpp"

namespace hexp {

// One side's phase.  The unbar phase stores only negative xi exponents;
// the bar phase stores exponents >= 0 with the xi^0 column equal to phi_n.
// Bar-side gauge constants alphabar ride separately: they belong to the
// zbar^{alphabar/hbar} prefactor, not to the phase series.
struct WKBPhase {
  HSymbol S;
  bool bar = false;
  std::vector<Rat> alphabar;
};

// Tallies of the structural checks performed while the recursion runs.
// Every check throws an Internal error on violation, so a report from a
// completed run certifies zero violations over the counted checks.
struct WkbReport {
  long vanish_checks = 0;  // rows beyond k = l + m verified zero
  long order_checks = 0;   // per-entry degree bounds verified
  long prime_checks = 0;   // closings verified free of primed variables
};

// Phase of the unbar dressing: sigma slices x[i] (negative shifts only,
// log-free) to S with S_n depending on x[0..n] alone.
WKBPhase exp_to_wkb(const std::vector<HSymbol>& x, WkbReport* rep = nullptr);
WKBPhase exp_to_wkb(const DressingTriple& dt, WkbReport* rep = nullptr);

// Bar-side phase: Sbar_n = phi_n + the mirrored recursion on xbar[i]
// (positive shifts).  The log slots of xbar[i] are reported as alphabar
// and excluded from the series.
WKBPhase exp_to_wkb_bar(const std::vector<HSymbol>& xbar, const HScalar& phi,
                        WkbReport* rep = nullptr);
WKBPhase exp_to_wkb_bar(const DressingTriple& dt, WkbReport* rep = nullptr);

// Inverse of exp_to_wkb: recovers the sigma slices of X from an unbar
// phase by homogeneous xi-degree, innermost degree first.
std::vector<HSymbol> wkb_to_exp(const WKBPhase& ph, WkbReport* rep = nullptr);

}  // namespace hexp
