// Tau assembly: phase coefficient extraction, the three gradient formulas,
// exact potential reconstruction, and the genus parity diagnostic.
//
// Degree trust.  The ring works modulo time degrees above the configured
// caps, and that quotient is exact: a stored coefficient of a surviving
// monomial equals its untruncated value.  Taking d/dt of a table entry,
// however, needs one degree more than the cap to get the top slice right,
// so every formula that differentiates a table loses one trusted degree in
// that family, and a derivative along a direction the ring does not carry
// at all (frozen variable) leaves nothing trusted.  The bound helpers
// below encode exactly where each gradient entry is reliable; comparisons
// and integrations clip to those bounds instead of failing on, or
// propagating, boundary garbage.

#include "hexp/tau.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "hexp/error.hpp"

namespace hexp {

namespace {

// Trusted region: monomials with t-degree <= dt and tbar-degree <= dtb.
// A negative bound in either family means the region is empty.
struct DegBound {
  int dt = -1;
  int dtb = -1;

  bool empty() const { return dt < 0 || dtb < 0; }
};

DegBound meet(const DegBound& a, const DegBound& b) {
  return {std::min(a.dt, b.dt), std::min(a.dtb, b.dtb)};
}

DegBound bound_ds(const RingConfig& cfg) { return {cfg.t_deg, cfg.tbar_deg}; }

DegBound bound_dt(const RingConfig& cfg, int n, int j) {
  if (n == 0 || j == 1) return {cfg.t_deg, cfg.tbar_deg};
  if (j - 1 > cfg.t_vars) return {-1, -1};
  return {cfg.t_deg - 1, cfg.tbar_deg};
}

DegBound bound_dtbar(const RingConfig& cfg, int n, int j) {
  if (n == 0) return {cfg.t_deg, cfg.tbar_deg};
  if (j > cfg.tbar_vars) return {-1, -1};
  return {cfg.t_deg, cfg.tbar_deg - 1};
}

// One integration/differentiation direction: s, t_j, or tbar_j.
struct Dir {
  enum Kind { kS, kT, kTbar } kind = kS;
  int j = 0;

  std::string name() const {
    switch (kind) {
      case kS:
        return "s";
      case kT:
        return "t" + std::to_string(j);
      case kTbar:
        return "tbar" + std::to_string(j);
    }
    return {};
  }
};

ScalarPoly apply_d(const ScalarPoly& p, const Dir& d) {
  switch (d.kind) {
    case Dir::kS:
      return p.d_s();
    case Dir::kT:
      return p.d_t(d.j);
    case Dir::kTbar:
      return p.d_tbar(d.j);
  }
  return p;
}

DegBound reduce(DegBound b, const Dir& d) {
  if (d.kind == Dir::kT) --b.dt;
  if (d.kind == Dir::kTbar) --b.dtb;
  return b;
}

const ScalarPoly& grad_entry(const TauGradient& g, int n, const Dir& d) {
  switch (d.kind) {
    case Dir::kS:
      return g.dF_ds[n];
    case Dir::kT:
      return g.dF_dt[n][d.j - 1];
    case Dir::kTbar:
      return g.dF_dtbar[n][d.j - 1];
  }
  return g.dF_ds[n];
}

DegBound entry_bound(const RingConfig& cfg, int n, const Dir& d) {
  switch (d.kind) {
    case Dir::kS:
      return bound_ds(cfg);
    case Dir::kT:
      return bound_dt(cfg, n, d.j);
    case Dir::kTbar:
      return bound_dtbar(cfg, n, d.j);
  }
  return bound_ds(cfg);
}

long long count_union(const ScalarPoly& a, const ScalarPoly& b) {
  auto ia = a.terms().begin(), ea = a.terms().end();
  auto ib = b.terms().begin(), eb = b.terms().end();
  long long n = 0;
  while (ia != ea || ib != eb) {
    ++n;
    if (ib == eb) {
      ++ia;
    } else if (ia == ea) {
      ++ib;
    } else if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      ++ia;
      ++ib;
    }
  }
  return n;
}

}  // namespace

ScalarPoly VTables::v_at(int n, int k) const {
  if (n == -1) return ScalarPoly::zero(cfg);
  require(n >= 0 && n <= n_hbar, ErrorKind::Config, "v table: order out of range");
  require(k >= 1 && k <= j_max, ErrorKind::Config, "v table: column out of range");
  return v[n][k - 1];
}

ScalarPoly VTables::vbar_at(int n, int k) const {
  if (n == -1) return ScalarPoly::zero(cfg);
  require(n >= 0 && n <= n_hbar, ErrorKind::Config,
          "vbar table: order out of range");
  require(k >= 1 && k <= jbar_max, ErrorKind::Config,
          "vbar table: column out of range");
  return vbar[n][k - 1];
}

ScalarPoly VTables::phi_at(int n) const {
  if (n == -1) return ScalarPoly::zero(cfg);
  require(n >= 0 && n <= n_hbar, ErrorKind::Config,
          "phi table: order out of range");
  return phi[n];
}

VTables extract_v(const WKBPhase& s_phase, const WKBPhase& sbar_phase) {
  require(!s_phase.bar, ErrorKind::Config,
          "extract_v: first argument must be the unbar phase");
  require(sbar_phase.bar, ErrorKind::Config,
          "extract_v: second argument must be the bar phase");
  const HSymbol& S = s_phase.S;
  const HSymbol& Sb = sbar_phase.S;
  require_same_cfg(S.cfg(), Sb.cfg(), "extract_v");
  require(S.trunc().n_hbar == Sb.trunc().n_hbar, ErrorKind::Config,
          "extract_v: phases truncated at different hbar orders");

  VTables tab;
  tab.cfg = S.cfg();
  tab.n_hbar = S.trunc().n_hbar;
  while (tab.j_max < -S.trunc().xi_lo && S.determined(-(tab.j_max + 1)))
    ++tab.j_max;
  while (tab.jbar_max < Sb.trunc().xi_hi && Sb.determined(tab.jbar_max + 1))
    ++tab.jbar_max;
  require(Sb.determined(0), ErrorKind::Window,
          "extract_v: phi column undetermined");

  for (int n = 0; n <= tab.n_hbar; ++n) {
    std::vector<ScalarPoly> row, rowb;
    for (int k = 1; k <= tab.j_max; ++k)
      row.push_back(S.coeff(n, -k) * rat_of(-k));
    for (int k = 1; k <= tab.jbar_max; ++k)
      rowb.push_back(Sb.coeff(n, k) * rat_of(k));
    tab.v.push_back(std::move(row));
    tab.vbar.push_back(std::move(rowb));
    tab.phi.push_back(Sb.coeff(n, 0));
  }
  return tab;
}

ScalarPoly grad_t(const VTables& tab, int n, int j) {
  require(n >= 0 && n <= tab.n_hbar, ErrorKind::Config,
          "grad_t: order out of range");
  require(j >= 1 && j <= tab.j_max, ErrorKind::Config,
          "grad_t: column out of range");
  ScalarPoly out = tab.v_at(n, j);
  if (n >= 1) {
    for (int k = 1; k <= j - 1; ++k) {
      if (k > tab.cfg.t_vars) continue;
      int l = j - k;
      out += tab.v_at(n - 1, l).d_t(k) * rat_of(1, l);
    }
  }
  return out;
}

ScalarPoly grad_tbar(const VTables& tab, int n, int j) {
  require(n >= 0 && n <= tab.n_hbar, ErrorKind::Config,
          "grad_tbar: order out of range");
  require(j >= 1 && j <= tab.jbar_max, ErrorKind::Config,
          "grad_tbar: column out of range");
  ScalarPoly acc = tab.vbar_at(n, j);
  if (n >= 1) {
    if (j <= tab.cfg.tbar_vars) acc += tab.phi_at(n - 1).d_tbar(j);
    for (int k = 1; k <= j - 1; ++k) {
      if (k > tab.cfg.tbar_vars) continue;
      int l = j - k;
      acc += tab.vbar_at(n - 1, l).d_tbar(k) * rat_of(1, l);
    }
  }
  return -acc;
}

ScalarPoly grad_s(const VTables& tab, int n, const std::vector<Rat>& kt) {
  require(n >= 0 && n <= tab.n_hbar, ErrorKind::Config,
          "grad_s: order out of range");
  require(static_cast<int>(kt.size()) > n / 2, ErrorKind::Config,
          "grad_s: K table too short");
  ScalarPoly out = tab.phi_at(n);
  if (n >= 1) out -= tab.phi_at(n - 1).d_s() * rat_of(1, 2);
  for (int p = 1; 2 * p <= n; ++p)
    out += tab.phi_at(n - 2 * p).d_s_pow(2 * p) * kt[p];
  return out;
}

TauGradient tau_gradient(const VTables& tab) {
  auto kt = k_coeffs(tab.n_hbar / 2 + 1);
  TauGradient g;
  g.cfg = tab.cfg;
  g.n_hbar = tab.n_hbar;
  g.j_max = tab.j_max;
  g.jbar_max = tab.jbar_max;
  for (int n = 0; n <= tab.n_hbar; ++n) {
    std::vector<ScalarPoly> row, rowb;
    for (int j = 1; j <= tab.j_max; ++j) row.push_back(grad_t(tab, n, j));
    for (int j = 1; j <= tab.jbar_max; ++j) rowb.push_back(grad_tbar(tab, n, j));
    g.dF_dt.push_back(std::move(row));
    g.dF_dtbar.push_back(std::move(rowb));
    g.dF_ds.push_back(grad_s(tab, n, kt));
  }
  return g;
}

TauExpansion integrate_F(const TauGradient& grad, IntegrateReport* rep) {
  const RingConfig& cfg = grad.cfg;
  const int rows = grad.n_hbar + 1;
  require(static_cast<int>(grad.dF_ds.size()) == rows &&
              static_cast<int>(grad.dF_dt.size()) == rows &&
              static_cast<int>(grad.dF_dtbar.size()) == rows,
          ErrorKind::Config, "integrate_F: gradient rows do not match n_hbar");

  // Only directions the ring actually carries can be differentiated along
  // or integrated back; higher gradient columns stay table data.
  const int jt = std::min(grad.j_max, cfg.t_vars);
  const int jb = std::min(grad.jbar_max, cfg.tbar_vars);
  std::vector<Dir> dirs;
  dirs.push_back({Dir::kS, 0});
  for (int j = 1; j <= jt; ++j) dirs.push_back({Dir::kT, j});
  for (int j = 1; j <= jb; ++j) dirs.push_back({Dir::kTbar, j});

  IntegrateReport local;
  TauExpansion out;
  out.cfg = cfg;

  for (int n = 0; n < rows; ++n) {
    // Compatibility first: d_b(dF/da) = d_a(dF/db) wherever both sides
    // are trusted.
    for (size_t a = 0; a + 1 < dirs.size(); ++a) {
      for (size_t b = a + 1; b < dirs.size(); ++b) {
        ScalarPoly lhs = apply_d(grad_entry(grad, n, dirs[a]), dirs[b]);
        ScalarPoly rhs = apply_d(grad_entry(grad, n, dirs[b]), dirs[a]);
        DegBound bb = meet(reduce(entry_bound(cfg, n, dirs[a]), dirs[b]),
                           reduce(entry_bound(cfg, n, dirs[b]), dirs[a]));
        if (bb.empty()) {
          ++local.pairs_skipped;
          local.coeffs_skipped += static_cast<long long>(lhs.terms().size()) +
                                  static_cast<long long>(rhs.terms().size());
          continue;
        }
        ScalarPoly lt = lhs.truncate_degree(bb.dt, bb.dtb);
        ScalarPoly rt = rhs.truncate_degree(bb.dt, bb.dtb);
        ++local.pairs_checked;
        local.coeffs_checked += count_union(lt, rt);
        local.coeffs_skipped +=
            static_cast<long long>(lhs.terms().size() - lt.terms().size()) +
            static_cast<long long>(rhs.terms().size() - rt.terms().size());
        if (!(lt == rt))
          fail(ErrorKind::Check,
               "cross-derivative mismatch (" + dirs[a].name() + ", " +
                   dirs[b].name() + ") at hbar order " + std::to_string(n));
      }
    }

    // s first: the antiderivative reproduces every s-dependent monomial.
    ScalarPoly F = grad.dF_ds[n].antideriv_s();
    // Then one time direction after another: integrate whatever part of
    // the gradient the accumulated F does not yet account for.  The
    // residual is clipped to its trusted degrees, which also keeps the
    // antiderivative below the ring's caps.
    for (int j = 1; j <= jt; ++j) {
      ScalarPoly r = grad.dF_dt[n][j - 1] - F.d_t(j);
      DegBound rb = meet(bound_dt(cfg, n, j), {cfg.t_deg - 1, cfg.tbar_deg});
      if (rb.empty()) continue;
      F += r.truncate_degree(rb.dt, rb.dtb).antideriv_t(j);
    }
    for (int j = 1; j <= jb; ++j) {
      ScalarPoly r = grad.dF_dtbar[n][j - 1] - F.d_tbar(j);
      DegBound rb = meet(bound_dtbar(cfg, n, j), {cfg.t_deg, cfg.tbar_deg - 1});
      if (rb.empty()) continue;
      F += r.truncate_degree(rb.dt, rb.dtb).antideriv_tbar(j);
    }

    Monomial unit;
    Rat c0 = F.coeff(unit);
    if (c0 != 0) F.add_term(unit, -c0);
    out.F.push_back(std::move(F));
  }

  if (rep) *rep = local;
  return out;
}

std::string ParityReport::summary() const {
  std::ostringstream os;
  os << "odd orders:";
  if (odd_orders.empty()) os << " none";
  for (int n : odd_orders) os << ' ' << n;
  os << "; t " << (t_ok ? "ok" : "violated") << ", tbar "
     << (tbar_ok ? "ok" : "violated") << ", s " << (s_ok ? "ok" : "violated")
     << "; conditions checked " << entries_checked << ", skipped "
     << entries_skipped << '\n';
  os << "genus-form: " << (genus_form() ? "yes" : "no") << '\n';
  return os.str();
}

ParityReport genus_parity_check(const VTables& tab) {
  auto kt = k_coeffs(tab.n_hbar / 2 + 1);
  ParityReport rep;
  auto judge = [&rep](const ScalarPoly& cond, const DegBound& b, bool* ok) {
    if (b.empty()) {
      ++rep.entries_skipped;
      return;
    }
    ++rep.entries_checked;
    if (!cond.truncate_degree(b.dt, b.dtb).is_zero()) *ok = false;
  };
  for (int n = 1; n <= tab.n_hbar; n += 2) {
    rep.odd_orders.push_back(n);
    for (int j = 1; j <= tab.j_max; ++j)
      judge(grad_t(tab, n, j), bound_dt(tab.cfg, n, j), &rep.t_ok);
    for (int j = 1; j <= tab.jbar_max; ++j)
      judge(grad_tbar(tab, n, j), bound_dtbar(tab.cfg, n, j), &rep.tbar_ok);
    judge(grad_s(tab, n, kt), bound_ds(tab.cfg), &rep.s_ok);
  }
  return rep;
}

}  // namespace hexp
