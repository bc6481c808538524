#pragma once
// Assembly of the tau expansion log tau = sum_n hbar^{n-2} F_n from the
// WKB phases.  The phases are read off into coefficient tables
//   S_n    = -sum_{k>=1} xi^{-k} v_{n,k} / k,
//   Sbar_n = phi_n + sum_{k>=1} xi^k vbar_{n,k} / k,
// which determine every first derivative of F_n.  F_n itself is then
// recovered exactly by integrating along a fixed path, and the genus
// question (is log tau even in hbar) reduces to vanishing conditions on
// the odd-order gradients.

#include <string>
#include <vector>

#include "hexp/wkb.hpp"

namespace hexp {

// Phase series coefficients indexed by hbar order n and xi exponent k.
// Column counts are window-determined: j_max (jbar_max) is the largest k
// whose coefficient the phase truncation still determines.
struct VTables {
  RingConfig cfg;
  int n_hbar = 0;
  int j_max = 0;
  int jbar_max = 0;
  std::vector<std::vector<ScalarPoly>> v;     // v[n][k-1]
  std::vector<std::vector<ScalarPoly>> vbar;  // vbar[n][k-1]
  std::vector<ScalarPoly> phi;                // phi[n]

  // Bounds-checked access; the n = -1 row reads as zero so the gradient
  // convolutions need no special casing.
  ScalarPoly v_at(int n, int k) const;
  ScalarPoly vbar_at(int n, int k) const;
  ScalarPoly phi_at(int n) const;
};

VTables extract_v(const WKBPhase& s_phase, const WKBPhase& sbar_phase);

// dF_n/dt_j = v_{n,j} + sum_{k+l=j, k,l>=1} (1/l) dv_{n-1,l}/dt_k.
ScalarPoly grad_t(const VTables& tab, int n, int j);

// dF_n/dtbar_j = -(vbar_{n,j} + dphi_{n-1}/dtbar_j
//                 + sum_{k+l=j, k,l>=1} (1/l) dvbar_{n-1,l}/dtbar_k).
// Derivatives along frozen directions (index beyond the configured
// variable count) contribute nothing here; integrate_F treats the
// affected slices as undetermined rather than trusting them.
ScalarPoly grad_tbar(const VTables& tab, int n, int j);

// dF_n/ds = phi_n - (1/2) d_s phi_{n-1}
//           + sum_{p=1}^{floor(n/2)} K_{2p} d_s^{2p} phi_{n-2p}.
// This is row n of T/(e^T - 1) at T = d_s Lambda^{-1} (Lambda shifting the
// order index), the exact inverse of the forward difference relation
// phi_n = sum_{m=1}^{n+1} (1/m!) d_s^m F_{n+1-m}; each Lambda^{-k} factor
// carries its d_s^k.  kt is a k_coeffs table with pmax >= n/2.
ScalarPoly grad_s(const VTables& tab, int n, const std::vector<Rat>& kt);

// Every gradient component at once: dF_dt[n][j-1], dF_dtbar[n][j-1],
// dF_ds[n] for n = 0..n_hbar and the window-determined column ranges.
struct TauGradient {
  RingConfig cfg;
  int n_hbar = 0;
  int j_max = 0;
  int jbar_max = 0;
  std::vector<std::vector<ScalarPoly>> dF_dt;
  std::vector<std::vector<ScalarPoly>> dF_dtbar;
  std::vector<ScalarPoly> dF_ds;
};

TauGradient tau_gradient(const VTables& tab);

// Bookkeeping from integrate_F's compatibility pass.  Coefficients on the
// trust boundary (degrees the truncation cannot fully determine) are
// excluded from comparison and counted, never failed.
struct IntegrateReport {
  long long coeffs_checked = 0;  // coefficient slots compared
  long long coeffs_skipped = 0;  // slots outside the trusted degree bounds
  int pairs_checked = 0;         // direction pairs with a nonempty overlap
  int pairs_skipped = 0;         // pairs whose trusted overlap was empty
};

struct TauExpansion {
  RingConfig cfg;
  std::vector<ScalarPoly> F;  // F[n], constant term normalized to zero
};

// Potential reconstruction.  First checks every pairwise cross-derivative
// equality of the gradient components on the coefficients both sides
// determine, throwing a Check error that names the offending pair on
// mismatch.  Then integrates along the fixed path s first, then t_1,
// t_2, ..., then tbar_1, ..., taking every integration constant to be
// zero, and normalizes each F_n to zero constant term.
TauExpansion integrate_F(const TauGradient& grad, IntegrateReport* rep = nullptr);

// Genus parity: log tau is even in hbar (up to constants) exactly when
// every odd-order gradient vanishes.  Evaluates the three condition
// families (t columns, tbar columns, s) at each odd n <= n_hbar on their
// trusted slices; conditions with no trusted slice are counted, not judged.
struct ParityReport {
  std::vector<int> odd_orders;
  bool t_ok = true;
  bool tbar_ok = true;
  bool s_ok = true;
  int entries_checked = 0;
  int entries_skipped = 0;

  bool genus_form() const { return t_ok && tbar_ok && s_ok; }
  std::string summary() const;
};

ParityReport genus_parity_check(const VTables& tab);

}  // namespace hexp
