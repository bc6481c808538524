#pragma once
// Dressing actions: the graded adjoint exponential Ad(e^{x/hbar}), the
// closed-form conjugation by e^{phi/hbar}, conjugation by the time flows
// e^{zeta/hbar}, and the sigma-level tilde maps that translate between
// integrated slice data and dressing generators.

#include "hexp/symbol.hpp"

namespace hexp {

// hbar-graded scalar: slot i holds the hbar^i coefficient.
using HScalar = std::vector<ScalarPoly>;

HScalar hscalar_zero(const RingConfig& cfg, int n_hbar);

// (phi(s) - phi(s + m hbar)) / hbar as a graded scalar:
// slot r collects -sum_{k=1}^{r+1} (m^k / k!) d_s^k phi_{r+1-k}.
HScalar shift_difference(const HScalar& phi, int m);

// hbar^{-1} [x, a] in the circ algebra.  Log slots on either side act as
// multiples of hbar d/ds.  The hbar^0 slice of a series-series commutator
// cancels identically; its absence is asserted.
HSymbol ad_once(const HSymbol& x, const HSymbol& a);

// Ad(e^{x/hbar}) a = sum_k (hbar^{-1} ad x)^k a / k!.  Termination
// certificate: the order-0 slice of x must be log-free and must contain
// no xi^0 term of time degree zero; every other generator term strictly
// shifts xi-support, raises the hbar order, or raises the time degree.
HSymbol exp_ad(const HSymbol& x, const HSymbol& a);

// Conjugation by e^{phi/hbar} for a graded scalar phi: each xi^m column
// of a is multiplied by exp(shift_difference(phi, m)); log slots pass
// through and shed the extra -c d_s(phi) series term.
HSymbol conj_by_phi(const HScalar& phi, const HSymbol& a);

// zeta(t, xi) = sum_{n=1}^{t_vars} t_n xi^n (bar: tbar_n xi^{-n}).
HSymbol zeta_symbol(const Truncation& tr, const RingConfig& cfg, bool bar);

// Ad(e^{zeta/hbar}) a with the appropriate zeta.  The active time count
// must fit inside the storage window.
HSymbol time_conjugate(const HSymbol& a, bool bar);

// sigma-level exponential adjoint e^{ad g} a with the Poisson bracket.
HSymbol exp_ad_sigma(const HSymbol& g, const HSymbol& a);

// sigma-level e^{sign * ad phi0}: xi^m coefficients pick up the factor
// exp(-sign m d_s phi0); a log slot c passes through and sheds
// -sign * c * d_s phi0 at xi^0.
HSymbol conj_by_phi0_sigma(const ScalarPoly& phi0, const HSymbol& a, int sign);

// Forward tilde map on a sigma slice:
//   unbar: sum_{n>=1} (1/n!) (ad sigma(X0))^{n-1} x
//   bar:   e^{ad phi0} applied after the same series with sigma(Xbar0).
HSymbol tilde_forward(const HSymbol& x, const HSymbol& gen0, bool bar,
                      const ScalarPoly* phi0 = nullptr);

// Inverse tilde map on a sigma slice:
//   unbar: (1 - (1/2) ad + sum_p K_{2p} ad^{2p}) with ad = ad sigma(X0)
//   bar:   e^{-ad phi0} first, then the same series with sigma(Xbar0).
HSymbol tilde_inverse(const HSymbol& xt, const HSymbol& gen0, bool bar,
                      const ScalarPoly* phi0 = nullptr);

}  // namespace hexp
