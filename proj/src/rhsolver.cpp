#include "hexp/rhsolver.hpp"

#include <algorithm>

namespace hexp {

namespace {

// One chart's integrand factor: F^{-1} (dG * P_i - dF * Q_i), with d
// either d_xi or d_s.  Slice products are pointwise.
HSymbol route(const HSymbol& invF, const HSymbol& F, const HSymbol& G,
              const HSymbol& Pi, const HSymbol& Qi, bool xi_route) {
  HSymbol dF = xi_route ? F.d_xi() : F.d_s();
  HSymbol dG = xi_route ? G.d_xi() : G.d_s();
  return ptmul(invF, ptmul(dG, Pi) - ptmul(dF, Qi));
}

// The chart-independent combination P0^{-1} xi^{-1} (-P_i + {P_i, Q_0}
// + {P_0, Q_i}); both charts must produce the same values wherever both
// are determined.
HSymbol compat_chart(const HSymbol& invF, const HSymbol& F, const HSymbol& G,
                     const HSymbol& Pi, const HSymbol& Qi) {
  HSymbol xim1 = HSymbol::xi_pow(Pi.trunc(), Pi.cfg(), -1);
  HSymbol inner = -Pi + poisson(Pi, G) + poisson(F, Qi);
  return ptmul(ptmul(invF, xim1), inner);
}

void fit_window(const RHData& d) {
  int hi = std::max(1, d.cfg.t_vars);
  int lo = std::min(-1, -d.cfg.tbar_vars);
  for (const HSymbol* a : {&d.f, &d.g, &d.fbar, &d.gbar, &d.x0, &d.xbar0}) {
    if (a->supp_empty()) continue;
    hi = std::max(hi, a->supp_hi());
    lo = std::min(lo, a->supp_lo());
  }
  if (d.tr.xi_hi < hi || d.tr.xi_lo > lo)
    fail(ErrorKind::Window,
         "xi window [" + std::to_string(d.tr.xi_lo) + ", " +
             std::to_string(d.tr.xi_hi) +
             "] cannot hold the data; retry with --xi-lo <= " +
             std::to_string(lo) + " and --xi-hi >= " + std::to_string(hi));
}

void check_ccr_pair(const HSymbol& f, const HSymbol& g, const char* label) {
  HSymbol resid = circ(f, g) - circ(g, f) - f.mul_hbar(1);
  require(resid.is_zero(), ErrorKind::Check,
          std::string("seed pair ") + label +
              " does not satisfy [f, g] = hbar f; residual " + resid.str());
}

// phi0 must exponentiate: d_s phi0 is c*l plus terms of time degree >= 1.
void check_phi0(const ScalarPoly& phi0) {
  ScalarPoly dphi = phi0.d_s();
  for (const auto& [mon, c] : dphi.terms()) {
    if (mon.t_degree() + mon.tbar_degree() >= 1) continue;
    bool pure_l = mon.u == 0 && mon.l == 1;
    require(pure_l, ErrorKind::Check,
            "d_s phi0 must be c*l plus time-carrying terms, got " +
                dphi.str());
  }
}

struct SigmaCharts {
  HSymbol F, G, Fb, Gb;
};

SigmaCharts sigma_charts(const RHData& d) {
  HSymbol zeta = zeta_symbol(d.tr, d.cfg, false);
  HSymbol zetab = zeta_symbol(d.tr, d.cfg, true);
  SigmaCharts c{HSymbol(d.tr, d.cfg), HSymbol(d.tr, d.cfg),
                HSymbol(d.tr, d.cfg), HSymbol(d.tr, d.cfg)};
  c.F = exp_ad_sigma(d.x0, exp_ad_sigma(zeta, d.f.slice(0)));
  c.G = exp_ad_sigma(d.x0, exp_ad_sigma(zeta, d.g.slice(0)));
  c.Fb = conj_by_phi0_sigma(
      d.phi0, exp_ad_sigma(d.xbar0, exp_ad_sigma(zetab, d.fbar.slice(0))), 1);
  c.Gb = conj_by_phi0_sigma(
      d.phi0, exp_ad_sigma(d.xbar0, exp_ad_sigma(zetab, d.gbar.slice(0))), 1);
  return c;
}

}  // namespace

HSymbol DressingTriple::x_total() const {
  HSymbol out(tr, cfg);
  for (int i = 0; i <= tr.n_hbar; ++i) out += X[i].mul_hbar(i);
  return out;
}

HSymbol DressingTriple::xbar_total() const {
  HSymbol out(tr, cfg);
  for (int i = 0; i <= tr.n_hbar; ++i) out += Xbar[i].mul_hbar(i);
  return out;
}

RHData c1_string_data(const Truncation& tr, const RingConfig& cfg) {
  if (cfg.t_vars > tr.xi_hi)
    fail(ErrorKind::Window,
         "the c1-string seed stores t_n at xi^n; retry with --xi-hi >= " +
             std::to_string(cfg.t_vars));
  RHData d(tr, cfg);
  d.f = HSymbol::xi_pow(tr, cfg, 1);
  d.g = HSymbol::from_scalar(tr, cfg, ScalarPoly::s_var(cfg));
  d.fbar = HSymbol::xi_pow(tr, cfg, 1).mul_scalar(ScalarPoly::u_pow(cfg, 1));
  d.fbar.add_term(1, 1, ScalarPoly::constant(cfg, -1));
  d.gbar = d.g;
  for (int n = 1; n <= cfg.t_vars; ++n)
    d.xbar0.add_term(0, n,
                     ScalarPoly::t_var(cfg, n) * ScalarPoly::u_pow(cfg, n));
  d.phi0 = ScalarPoly::u_pow(cfg, 1) -
           ScalarPoly::u_pow(cfg, 1) * ScalarPoly::l_pow(cfg, 1);
  return d;
}

void verify_seed(const RHData& d, std::string* notes) {
  fit_window(d);
  require(d.x0.is_sigma() && !d.x0.has_logxi(), ErrorKind::Check,
          "seed x0 must be a log-free sigma slice");
  require(d.xbar0.is_sigma() && !d.xbar0.has_logxi(), ErrorKind::Check,
          "seed xbar0 must be a log-free sigma slice (alphabar_0 = 0)");
  require(d.x0.supp_empty() || d.x0.supp_hi() <= -1, ErrorKind::Check,
          "seed x0 must have only negative shifts");
  require(d.xbar0.supp_empty() || d.xbar0.supp_lo() >= 1, ErrorKind::Check,
          "seed xbar0 must have only positive shifts");
  check_phi0(d.phi0);
  check_ccr_pair(d.f, d.g, "(f, g)");
  check_ccr_pair(d.fbar, d.gbar, "(fbar, gbar)");

  SigmaCharts c = sigma_charts(d);
  std::string report;
  long cells_f = 0, cells_g = 0;
  bool okf = equal_on_overlap(c.F, c.Fb, &report, &cells_f);
  bool okg = equal_on_overlap(c.G, c.Gb, &report, &cells_g);
  require(okf && okg, ErrorKind::Check,
          "dispersionless charts disagree at order zero:\n" + report);
  require(cells_f > 0 && cells_g > 0, ErrorKind::Window,
          "dispersionless charts share no determined cells; widen the xi "
          "window");

  std::string ccr_report;
  bool ccr_ok = equal_on_overlap(poisson(c.F, c.G), c.F, &ccr_report) &&
                equal_on_overlap(poisson(c.Fb, c.Gb), c.Fb, &ccr_report);
  require(ccr_ok, ErrorKind::Check,
          "sigma-level bracket relation {F, G} = F fails:\n" + ccr_report);

  if (notes) {
    *notes += "seed: operator relations hold for both pairs\n";
    *notes += "seed: dispersionless charts agree on " +
              std::to_string(cells_f + cells_g) + " cells\n";
    *notes += "seed: sigma bracket relation {F, G} = F holds\n";
  }
}

DressingTriple solve_rh(const RHData& d, SolveReport* report) {
  verify_seed(d, report ? &report->seed_notes : nullptr);
  const Truncation& tr = d.tr;
  DressingTriple out(tr, d.cfg);
  out.X[0] = d.x0;
  out.Xbar[0] = d.xbar0;
  out.phi[0] = d.phi0;

  HSymbol ft = time_conjugate(d.f, false);
  HSymbol gt = time_conjugate(d.g, false);
  HSymbol fbt = time_conjugate(d.fbar, true);
  HSymbol gbt = time_conjugate(d.gbar, true);

  for (int i = 1; i <= tr.n_hbar; ++i) {
    HSymbol xsum(tr, d.cfg), xbsum(tr, d.cfg);
    HScalar phi_partial = hscalar_zero(d.cfg, tr.n_hbar);
    for (int j = 0; j < i; ++j) {
      xsum += out.X[j].mul_hbar(j);
      xbsum += out.Xbar[j].mul_hbar(j);
      phi_partial[j] = out.phi[j];
    }
    HSymbol P = exp_ad(xsum, ft);
    HSymbol Q = exp_ad(xsum, gt);
    HSymbol Pb = conj_by_phi(phi_partial, exp_ad(xbsum, fbt));
    HSymbol Qb = conj_by_phi(phi_partial, exp_ad(xbsum, gbt));

    StepReport step;
    step.order = i;
    for (int j = 0; j < i; ++j) {
      std::string rep;
      long cp = 0, cq = 0;
      bool okp = equal_on_overlap(P.slice(j), Pb.slice(j), &rep, &cp);
      bool okq = equal_on_overlap(Q.slice(j), Qb.slice(j), &rep, &cq);
      require(okp && okq, ErrorKind::Check,
              "induction broken at order " + std::to_string(j) +
                  " while solving order " + std::to_string(i) + ":\n" + rep);
      step.induction_cells += cp + cq;
    }

    HSymbol F = P.slice(0), G = Q.slice(0);
    HSymbol Fb = Pb.slice(0), Gb = Qb.slice(0);
    HSymbol Pi = P.slice(i), Qi = Q.slice(i);
    HSymbol Pbi = Pb.slice(i), Qbi = Qb.slice(i);
    HSymbol invF = invert_sigma(F);
    HSymbol invFb = invert_sigma(Fb);

    {
      std::string rep;
      long cc = 0;
      bool ok = equal_on_overlap(compat_chart(invF, F, G, Pi, Qi),
                                 compat_chart(invFb, Fb, Gb, Pbi, Qbi), &rep,
                                 &cc);
      require(ok, ErrorKind::Check,
              "charts incompatible at order " + std::to_string(i) + ":\n" +
                  rep);
      require(cc > 0, ErrorKind::Window,
              "no determined cells left for the order-" + std::to_string(i) +
                  " compatibility check; widen the xi window");
      step.compat_cells = cc;
    }

    HSymbol A = route(invFb, Fb, Gb, Pbi, Qbi, true) -
                route(invF, F, G, Pi, Qi, true);
    HSymbol B = route(invFb, Fb, Gb, Pbi, Qbi, false) -
                route(invF, F, G, Pi, Qi, false);

    Rat abar = 0;
    HSymbol T = antideriv_xi(A, &abar);

    require(B.determined(0), ErrorKind::Window,
            "xi^0 coefficient undetermined at order " + std::to_string(i) +
                "; widen the xi window");
    ScalarPoly phi_i = B.coeff(0, 0).antideriv_s();

    {
      HSymbol B0(tr, d.cfg);
      B0.add_term(0, 0, B.coeff(0, 0));
      std::string rep;
      long rc = 0;
      bool ok = equal_on_overlap(T.d_s(), B - B0, &rep, &rc);
      require(ok, ErrorKind::Check,
              "the xi and s integration routes disagree at order " +
                  std::to_string(i) + ":\n" + rep);
      step.route_cells = rc;
    }

    HSymbol Xt = -(T.project(-kDetInf, -1));
    HSymbol Xbt = T.project(1, kDetInf);
    Xbt.set_logxi(0, abar);

    out.X[i] = tilde_inverse(Xt, d.x0, false);
    out.Xbar[i] = tilde_inverse(Xbt, d.xbar0, true, &d.phi0);
    out.phi[i] = phi_i;
    out.alphabar[i] = abar;
    step.alphabar = abar;
    if (report) report->steps.push_back(step);
  }
  return out;
}

}  // namespace hexp
