#include "hexp/adjoint.hpp"

namespace hexp {

namespace {

// Splits off the log slots of x, returning the series part.
HSymbol series_part(const HSymbol& x) {
  HSymbol out = x;
  for (int n = 0; n <= x.trunc().n_hbar; ++n) out.set_logxi(n, 0);
  return out;
}

// hbar^{-1} applied to a symbol whose hbar^0 slice vanishes.
HSymbol div_hbar(const HSymbol& a, const char* where) {
  require(a.order_terms(0).empty() && a.logxi(0) == 0, ErrorKind::Internal,
          std::string(where) + ": hbar^0 slice did not cancel");
  HSymbol out(a.trunc(), a.cfg());
  out.restrict_det(a.det_lo(), a.det_hi());
  for (int n = 1; n <= a.trunc().n_hbar; ++n) {
    for (const auto& [m, p] : a.order_terms(n)) out.add_term(n - 1, m, p);
    out.set_logxi(n - 1, a.logxi(n));
  }
  return out;
}

int iteration_guard(const HSymbol& a) {
  const Truncation& tr = a.trunc();
  return (tr.xi_hi - tr.xi_lo + 1) + tr.n_hbar + a.cfg().t_deg +
         a.cfg().tbar_deg + 4;
}

// Checks that the ad-series of x terminates and returns a bound on the
// number of applications that can still touch the hbar^0 slice.  Slices
// at hbar^1 and above raise the order, so only the hbar^0 slice needs a
// certificate: every time-free term must carry a nonzero shift, and all
// such shifts must share one sign so the support drifts out of the
// window monotonically.  Time-carrying terms terminate by the degree
// caps instead.
int termination_bound(const HSymbol& x, const char* where) {
  require(x.logxi(0) == 0, ErrorKind::Check,
          std::string(where) + ": generator has an hbar^0 log slot");
  bool timefree_neg = false;
  bool timefree_pos = false;
  for (const auto& [m, p] : x.order_terms(0)) {
    for (const auto& [mon, c] : p.terms()) {
      if (mon.t_degree() + mon.tbar_degree() >= 1) continue;
      require(m != 0, ErrorKind::Check,
              std::string(where) +
                  ": generator has a time-free xi^0 term at hbar^0: " +
                  p.str());
      (m < 0 ? timefree_neg : timefree_pos) = true;
    }
  }
  require(!(timefree_neg && timefree_pos), ErrorKind::Check,
          std::string(where) +
              ": time-free hbar^0 terms of the generator mix shift signs");
  const Truncation& tr = x.trunc();
  int bound = x.cfg().t_deg + x.cfg().tbar_deg + 1;
  if (timefree_neg || timefree_pos) bound += tr.xi_hi - tr.xi_lo + 2;
  return bound;
}

}  // namespace

HScalar hscalar_zero(const RingConfig& cfg, int n_hbar) {
  return HScalar(n_hbar + 1, ScalarPoly::zero(cfg));
}

HScalar shift_difference(const HScalar& phi, int m) {
  require(!phi.empty(), ErrorKind::Internal, "shift_difference: empty phi");
  const RingConfig& cfg = phi[0].cfg();
  int N = (int)phi.size() - 1;
  HScalar out = hscalar_zero(cfg, N);
  if (m == 0) return out;
  for (int r = 0; r <= N; ++r) {
    for (int k = 1; k <= r + 1; ++k) {
      const ScalarPoly& src = phi[r + 1 - k];
      if (src.is_zero()) continue;
      out[r] += src.d_s_pow(k) * (-rat_pow(Rat(m), k) / rat_factorial(k));
    }
  }
  return out;
}

HSymbol ad_once(const HSymbol& x, const HSymbol& a) {
  require_same_shape(x, a, "ad_once");
  const Truncation& tr = x.trunc();
  HSymbol xs = series_part(x);
  HSymbol as = series_part(a);
  HSymbol comm = circ(xs, as) - circ(as, xs);
  HSymbol out = div_hbar(comm, "ad_once");
  // Log slots of x act as c_n hbar^n * hbar d/ds.
  for (int n = 0; n <= tr.n_hbar; ++n) {
    if (x.logxi(n) != 0)
      out += as.d_s().mul_hbar(n).mul_rat(x.logxi(n));
    if (a.logxi(n) != 0)
      out -= xs.d_s().mul_hbar(n).mul_rat(a.logxi(n));
  }
  return out;
}

HSymbol exp_ad(const HSymbol& x, const HSymbol& a) {
  int slot0_bound = termination_bound(x, "exp_ad");
  // Every ad application costs one exact top order, so the series runs
  // with that many orders of headroom and is restricted back at the end.
  // A term still visible at the original orders has applied the hbar^0
  // slice all but n_hbar times, which caps the useful iteration count.
  const Truncation& tr = a.trunc();
  int max_ads = tr.n_hbar + slot0_bound + 2;
  Truncation ext = tr;
  ext.n_hbar = tr.n_hbar + max_ads;
  HSymbol xe = with_truncation(x, ext);
  HSymbol acc = with_truncation(a, ext);
  HSymbol term = acc;
  for (int k = 1; !term.is_zero(); ++k) {
    require(k <= max_ads, ErrorKind::Internal,
            "exp_ad failed to terminate within the certificate bound");
    term = ad_once(xe, term).mul_rat(Rat(1) / Rat(k));
    acc += term;
    bool low = false;
    for (int n = 0; n <= tr.n_hbar && !low; ++n)
      low = !term.order_terms(n).empty() || term.logxi(n) != 0;
    if (!low) break;
  }
  return with_truncation(acc, tr);
}

HSymbol conj_by_phi(const HScalar& phi, const HSymbol& a) {
  const Truncation& tr = a.trunc();
  const RingConfig& cfg = a.cfg();
  require((int)phi.size() == tr.n_hbar + 1, ErrorKind::Internal,
          "conj_by_phi: phi grading does not match the truncation");
  HSymbol out(tr, cfg);
  out.restrict_det(a.det_lo(), a.det_hi());
  std::map<int, HScalar> factor_cache;
  for (int n = 0; n <= tr.n_hbar; ++n) {
    for (const auto& [m, p] : a.order_terms(n)) {
      auto it = factor_cache.find(m);
      if (it == factor_cache.end())
        it = factor_cache.emplace(m, exp_hgraded(shift_difference(phi, m)))
                 .first;
      const HScalar& E = it->second;
      for (int r = 0; n + r <= tr.n_hbar; ++r)
        out.add_term(n + r, m, E[r] * p);
    }
    // A log slot c hbar^n * hbar d/ds conjugates to itself minus
    // c d_s(phi) at xi^0.
    if (a.logxi(n) != 0) {
      out.set_logxi(n, out.logxi(n) + a.logxi(n));
      for (int r = 0; n + r <= tr.n_hbar; ++r)
        out.add_term(n + r, 0, phi[r].d_s() * (-a.logxi(n)));
    }
  }
  return out;
}

HSymbol zeta_symbol(const Truncation& tr, const RingConfig& cfg, bool bar) {
  HSymbol out(tr, cfg);
  int count = bar ? cfg.tbar_vars : cfg.t_vars;
  for (int n = 1; n <= count; ++n) {
    int m = bar ? -n : n;
    require(m >= tr.xi_lo && m <= tr.xi_hi, ErrorKind::Config,
            "time variable count exceeds the storage window");
    out.add_term(0, m,
                 bar ? ScalarPoly::tbar_var(cfg, n) : ScalarPoly::t_var(cfg, n));
  }
  return out;
}

HSymbol time_conjugate(const HSymbol& a, bool bar) {
  HSymbol zeta = zeta_symbol(a.trunc(), a.cfg(), bar);
  if (zeta.is_zero()) return a;
  return exp_ad(zeta, a);
}

HSymbol exp_ad_sigma(const HSymbol& g, const HSymbol& a) {
  require_sigma(g, "exp_ad_sigma");
  require_sigma(a, "exp_ad_sigma");
  require(!g.has_logxi(), ErrorKind::Internal,
          "exp_ad_sigma: log-carrying generator");
  HSymbol acc = a;
  HSymbol term = a;
  int guard = iteration_guard(a);
  for (int k = 1; !term.is_zero(); ++k) {
    require(k <= guard, ErrorKind::Internal,
            "exp_ad_sigma failed to terminate");
    term = poisson(g, term).mul_rat(Rat(1) / Rat(k));
    acc += term;
  }
  return acc;
}

HSymbol conj_by_phi0_sigma(const ScalarPoly& phi0, const HSymbol& a,
                           int sign) {
  require_sigma(a, "conj_by_phi0_sigma");
  require(sign == 1 || sign == -1, ErrorKind::Internal,
          "conj_by_phi0_sigma: sign must be +-1");
  const Truncation& tr = a.trunc();
  const RingConfig& cfg = a.cfg();
  ScalarPoly dphi = phi0.d_s();
  HSymbol out(tr, cfg);
  out.restrict_det(a.det_lo(), a.det_hi());
  for (const auto& [m, p] : a.order_terms(0)) {
    if (m == 0) {
      out.add_term(0, 0, p);
      continue;
    }
    out.add_term(0, m, exp_scalar(dphi * Rat(-sign * m)) * p);
  }
  if (a.logxi(0) != 0) {
    out.set_logxi(0, a.logxi(0));
    out.add_term(0, 0, dphi * (-Rat(sign) * a.logxi(0)));
  }
  return out;
}

namespace {

// sum_{n>=1} (1/n!) (ad gen0)^{n-1} x with the Poisson bracket.
HSymbol tilde_forward_series(const HSymbol& x, const HSymbol& gen0) {
  HSymbol acc = x;
  HSymbol term = x;
  int guard = iteration_guard(x);
  for (int n = 2; !term.is_zero(); ++n) {
    require(n <= guard + 2, ErrorKind::Internal,
            "tilde_forward failed to terminate");
    term = poisson(gen0, term);
    if (term.is_zero()) break;
    acc += term.mul_rat(Rat(1) / rat_factorial(n));
  }
  return acc;
}

// (1 - (1/2) ad + sum_{p>=1} K_{2p} ad^{2p}) x with ad = ad gen0.
HSymbol tilde_inverse_series(const HSymbol& xt, const HSymbol& gen0) {
  HSymbol acc = xt;
  HSymbol power = xt;
  int guard = iteration_guard(xt);
  auto K = k_coeffs(guard / 2 + 1);
  for (int j = 1; !power.is_zero(); ++j) {
    require(j <= guard, ErrorKind::Internal,
            "tilde_inverse failed to terminate");
    power = poisson(gen0, power);
    if (power.is_zero()) break;
    if (j == 1)
      acc += power.mul_rat(rat_of(-1, 2));
    else if (j % 2 == 0)
      acc += power.mul_rat(K[j / 2]);
  }
  return acc;
}

}  // namespace

HSymbol tilde_forward(const HSymbol& x, const HSymbol& gen0, bool bar,
                      const ScalarPoly* phi0) {
  require_sigma(x, "tilde_forward");
  require_sigma(gen0, "tilde_forward");
  HSymbol series = tilde_forward_series(x, gen0);
  if (!bar) return series;
  require(phi0 != nullptr, ErrorKind::Internal,
          "tilde_forward: bar side needs phi0");
  return conj_by_phi0_sigma(*phi0, series, 1);
}

HSymbol tilde_inverse(const HSymbol& xt, const HSymbol& gen0, bool bar,
                      const ScalarPoly* phi0) {
  require_sigma(xt, "tilde_inverse");
  require_sigma(gen0, "tilde_inverse");
  HSymbol y = xt;
  if (bar) {
    require(phi0 != nullptr, ErrorKind::Internal,
            "tilde_inverse: bar side needs phi0");
    y = conj_by_phi0_sigma(*phi0, xt, -1);
  }
  return tilde_inverse_series(y, gen0);
}

}  // namespace hexp
