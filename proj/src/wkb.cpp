#include "hexp/wkb.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hexp/error.hpp"

namespace hexp {

namespace {

// xi-exponent -> coefficient, nonzero entries only.
using XiSeries = std::map<int, ScalarPoly>;

void xs_add(XiSeries& dst, int e, const ScalarPoly& p) {
  if (p.is_zero()) return;
  auto it = dst.find(e);
  if (it == dst.end()) {
    dst.emplace(e, p);
  } else {
    it->second += p;
    if (it->second.is_zero()) dst.erase(it);
  }
}

XiSeries xs_ds(const XiSeries& a) {
  XiSeries out;
  for (const auto& [e, p] : a) xs_add(out, e, p.d_s());
  return out;
}

void xs_scale(XiSeries& a, const Rat& c) {
  for (auto& [e, p] : a) p *= c;
}

// Bivariate workspace entry: (a, b) -> coefficient of xi^a xi'^b over the
// doubled ring.  Entries are kept sparse; a default Biv is zero.
struct Biv {
  std::map<std::pair<int, int>, DblScalar> cells;

  bool is_zero() const { return cells.empty(); }
};

void biv_add(Biv& dst, std::pair<int, int> key, const DblScalar& v) {
  if (v.is_zero()) return;
  auto it = dst.cells.find(key);
  if (it == dst.cells.end()) {
    dst.cells.emplace(key, v);
  } else {
    it->second += v;
    if (it->second.is_zero()) dst.cells.erase(it);
  }
}

void biv_scale(Biv& a, const Rat& c) {
  for (auto& [key, v] : a.cells) v *= c;
}

// Degree bookkeeping for one side.  The unbar side lives in negative total
// xi-degree a + b, the bar side in positive; deg_idx maps a total degree to
// the homogeneity index j counted positively, and jmax is the widest index
// the storage window can hold.  Degrees only move away from zero in the
// recursion, so cells beyond jmax are dropped exactly.
struct Side {
  bool bar = false;
  int jmax = 0;

  int deg_idx(int d) const { return bar ? d : -d; }
};

// xi d/dxi d/ds' : scales each cell by its unprimed exponent and takes the
// primed s-derivative.
Biv xidxi_dsp(const Biv& y) {
  Biv out;
  for (const auto& [key, v] : y.cells) {
    if (key.first == 0) continue;
    DblScalar d = v.d_sp();
    if (d.is_zero()) continue;
    biv_add(out, key, d * Rat(key.first));
  }
  return out;
}

// Accumulates (xi d/dxi y) * f(s', xi') into out, where f is a plain
// xi-series re-read in the primed variables.
void mul_primed_into(Biv& out, const Biv& y, const XiSeries& f,
                     const Side& side) {
  for (const auto& [key, v] : y.cells) {
    if (key.first == 0) continue;
    DblScalar scaled = v * Rat(key.first);
    for (const auto& [c, p] : f) {
      if (side.deg_idx(key.first + key.second + c) > side.jmax) continue;
      biv_add(out, {key.first, key.second + c},
              scaled * DblScalar::embed(p, true));
    }
  }
}

XiSeries biv_diag(const Biv& y) {
  XiSeries out;
  for (const auto& [key, v] : y.cells)
    xs_add(out, key.first + key.second, v.eval_diagonal());
  return out;
}

Biv biv_embed(const XiSeries& a) {
  Biv out;
  for (const auto& [e, p] : a)
    biv_add(out, {e, 0}, DblScalar::embed(p, false));
  return out;
}

void check_vanish(const Biv& row, const char* where, WkbReport* rep) {
  if (rep) ++rep->vanish_checks;
  if (!row.is_zero())
    fail(ErrorKind::Internal,
         std::string(where) + ": workspace row beyond k = l + m is nonzero");
}

void check_order(const Biv& y, int l, const Side& side, const char* where,
                 WkbReport* rep) {
  if (rep) ++rep->order_checks;
  for (const auto& [key, v] : y.cells) {
    (void)v;
    if (side.deg_idx(key.first + key.second) < l + 1)
      fail(ErrorKind::Internal,
           std::string(where) + ": workspace entry below the degree bound");
  }
}

// Forward recursion: per-order symbols x[0..N] of the generator to the
// per-order phase series.  Group l feeds S^{(l+1)}; the group at l = jmax
// is computed as well so the cutoff S^{(l)} = 0 inside the window for
// l > jmax is checked rather than assumed.
std::vector<XiSeries> run_forward(const std::vector<XiSeries>& xs,
                                  const Side& side, WkbReport* rep) {
  const int nmax = static_cast<int>(xs.size()) - 1;
  const int lmax = side.jmax;

  // y[l][k][m], rows k = 0..l+m+1 with the last row a vanish check.
  std::vector<std::vector<std::vector<Biv>>> y(lmax + 1);
  for (int l = 0; l <= lmax; ++l)
    y[l].assign(l + nmax + 2, std::vector<Biv>(nmax + 1));
  // ds_s[lam][m] = d/ds of S^{(lam)}_m, the primed-slot factor.
  std::vector<std::vector<XiSeries>> ds_s(
      lmax + 1, std::vector<XiSeries>(nmax + 1));
  std::vector<XiSeries> out(nmax + 1);

  for (int n = 0; n <= nmax; ++n) {
    for (int l = 0; l <= lmax; ++l) {
      if (l == 0) y[0][0][n] = biv_embed(xs[n]);
      for (int k = 0; k <= l + n; ++k) {
        Biv next;
        if (n >= 1) next = xidxi_dsp(y[l][k][n - 1]);
        for (int lam = 1; lam <= l; ++lam) {
          // Rows beyond the lower group's vanish bound are zero and not
          // stored.
          if (k >= static_cast<int>(y[l - lam].size())) continue;
          for (int mp = 0; mp <= n; ++mp) {
            const XiSeries& f = ds_s[lam][mp];
            if (f.empty()) continue;
            mul_primed_into(next, y[l - lam][k][n - mp], f, side);
          }
        }
        biv_scale(next, rat_of(1, k + 1));
        y[l][k + 1][n] = std::move(next);
      }
      check_vanish(y[l][l + n + 1][n], "exp_to_wkb", rep);
      for (int k = 0; k <= l + n; ++k)
        check_order(y[l][k][n], l, side, "exp_to_wkb", rep);
      if (l == lmax) continue;
      XiSeries snew;
      for (int k = 0; k <= l + n; ++k)
        for (const auto& [e, p] : biv_diag(y[l][k][n])) xs_add(snew, e, p);
      xs_scale(snew, rat_of(1, l + 1));
      for (const auto& [e, p] : snew) xs_add(out[n], e, p);
      ds_s[l + 1][n] = xs_ds(snew);
    }
  }
  return out;
}

// Inverse recursion: per-order phase series to generator symbols, column
// by column in the homogeneity index j.  Each column is closed at
// Y^{(0)}_{0,m,j} after all other groups are known; the closing value is
// the degree-j piece of X_m.
std::vector<XiSeries> run_inverse(const std::vector<XiSeries>& ss,
                                  const Side& side, WkbReport* rep) {
  const int nmax = static_cast<int>(ss.size()) - 1;
  const int jmax = side.jmax;

  // Homogeneous input pieces: s_piece[m][j] is the coefficient at degree
  // index j (a single xi-exponent on each side).
  std::vector<std::vector<ScalarPoly>> s_piece(
      nmax + 1, std::vector<ScalarPoly>(jmax + 1));
  for (int m = 0; m <= nmax; ++m)
    for (const auto& [e, p] : ss[m]) {
      int j = side.deg_idx(e);
      if (j >= 1 && j <= jmax) s_piece[m][j] = p;
    }

  const int exp_sign = side.bar ? 1 : -1;

  // y[l][k][m][j] and the accumulated primed-slot factors
  // tfac[lam][m][j] = (1/lam) sum_k d/ds of diag Y^{(lam-1)}_{k,m,j}.
  std::vector<std::vector<std::vector<std::vector<Biv>>>> y(jmax + 1);
  for (int l = 0; l <= jmax; ++l) {
    y[l].assign(l + nmax + 2, {});
    for (int k = 0; k <= l + nmax + 1; ++k)
      y[l][k].assign(nmax + 1, std::vector<Biv>(jmax + 1));
  }
  std::vector<std::vector<std::vector<XiSeries>>> tfac(
      jmax + 1, std::vector<std::vector<XiSeries>>(
                    nmax + 1, std::vector<XiSeries>(jmax + 1)));
  std::vector<XiSeries> out(nmax + 1);

  for (int m = 0; m <= nmax; ++m) {
    for (int j = 1; j <= jmax; ++j) {
      for (int l = 0; l <= jmax; ++l) {
        for (int k = 0; k <= l + m; ++k) {
          Biv next;
          if (m >= 1) next = xidxi_dsp(y[l][k][m - 1][j]);
          for (int lam = 1; lam <= l; ++lam) {
            if (k >= static_cast<int>(y[l - lam].size())) continue;
            for (int jp = 1; jp < j; ++jp)
              for (int mp = 0; mp <= m; ++mp) {
                const XiSeries& f = tfac[lam][mp][jp];
                if (f.empty()) continue;
                mul_primed_into(next, y[l - lam][k][m - mp][j - jp], f, side);
              }
          }
          biv_scale(next, rat_of(1, k + 1));
          y[l][k + 1][m][j] = std::move(next);
        }
        check_vanish(y[l][l + m + 1][m][j], "wkb_to_exp", rep);
      }
      // Close the column: the degree-j piece of X_m plus the diagonal
      // remainder reproduces S_{m,j}.
      XiSeries closing;
      xs_add(closing, exp_sign * j, s_piece[m][j]);
      for (int l = 0; l < j; ++l)
        for (int k = (l == 0 ? 1 : 0); k <= l + m; ++k) {
          XiSeries d = biv_diag(y[l][k][m][j]);
          xs_scale(d, rat_of(-1, l + 1));
          for (const auto& [e, p] : d) xs_add(closing, e, p);
        }
      if (rep) ++rep->prime_checks;
      for (const auto& [e, p] : closing) {
        (void)p;
        if (e != exp_sign * j)
          fail(ErrorKind::Internal,
               "wkb_to_exp: closing value is not homogeneous of degree j");
      }
      y[0][0][m][j] = biv_embed(closing);
      for (const auto& [key, v] : y[0][0][m][j].cells)
        if (v.has_primed_part() || key.second != 0)
          fail(ErrorKind::Internal,
               "wkb_to_exp: closing value carries primed variables");
      for (const auto& [e, p] : closing) xs_add(out[m], e, p);
      // Structural checks: entries sit at their homogeneous degree above
      // the group bound, and groups at l >= j vanish identically.
      for (int l = 0; l <= jmax; ++l)
        for (int k = 0; k <= l + m; ++k) {
          const Biv& cell = y[l][k][m][j];
          check_order(cell, l, side, "wkb_to_exp", rep);
          for (const auto& [key, v] : cell.cells) {
            (void)v;
            if (side.deg_idx(key.first + key.second) != j)
              fail(ErrorKind::Internal,
                   "wkb_to_exp: workspace entry off its homogeneous degree");
          }
          if (l >= j) {
            if (rep) ++rep->vanish_checks;
            if (!cell.is_zero())
              fail(ErrorKind::Internal,
                   "wkb_to_exp: workspace group at l >= j is nonzero");
          }
        }
      for (int lam = 1; lam <= jmax; ++lam) {
        XiSeries acc;
        for (int k = 0; k <= lam - 1 + m; ++k)
          for (const auto& [e, p] : biv_diag(y[lam - 1][k][m][j]))
            xs_add(acc, e, p);
        xs_scale(acc, rat_of(1, lam));
        tfac[lam][m][j] = xs_ds(acc);
      }
    }
  }
  return out;
}

// Pulls the sigma-slice content of x[i] as a plain xi-series, validating
// shape: one slice per hbar order, shared truncation and ring, support on
// the proper side, determinacy reaching the far edge of the window.  Log
// slots are allowed only when alphabar is supplied to collect them.
std::vector<XiSeries> slice_series(const std::vector<HSymbol>& x, bool bar,
                                   const char* where,
                                   std::vector<Rat>* alphabar,
                                   long long* det_edge) {
  require(!x.empty(), ErrorKind::Config,
          std::string(where) + ": no slices given");
  const Truncation& tr = x[0].trunc();
  require(static_cast<int>(x.size()) == tr.n_hbar + 1, ErrorKind::Config,
          std::string(where) + ": slice count does not match the truncation");
  *det_edge = bar ? static_cast<long long>(tr.xi_hi)
                  : static_cast<long long>(tr.xi_lo);
  std::vector<XiSeries> xs(x.size());
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    const HSymbol& s = x[i];
    require(s.trunc() == tr, ErrorKind::Config,
            std::string(where) + ": slices disagree on the truncation");
    require_same_cfg(s.cfg(), x[0].cfg(), where);
    require(s.is_sigma(), ErrorKind::Config,
            std::string(where) + ": slices must be hbar^0 data");
    if (alphabar) {
      (*alphabar)[i] = s.logxi(0);
    } else {
      require(!s.has_logxi(), ErrorKind::Check,
              std::string(where) + ": slices must be log-free");
    }
    if (!s.supp_empty()) {
      if (bar)
        require(s.supp_lo() >= 1, ErrorKind::Check,
                std::string(where) + ": slices must have only positive shifts");
      else
        require(s.supp_hi() <= -1, ErrorKind::Check,
                std::string(where) + ": slices must have only negative shifts");
    }
    if (bar) {
      require(s.det_lo() <= tr.xi_lo, ErrorKind::Window,
              std::string(where) +
                  ": slices must be determined through the bottom of the "
                  "window");
      *det_edge = std::min(*det_edge, s.det_hi());
    } else {
      require(s.det_hi() >= tr.xi_hi, ErrorKind::Window,
              std::string(where) +
                  ": slices must be determined through the top of the window");
      *det_edge = std::max(*det_edge, s.det_lo());
    }
    for (const auto& [e, p] : s.order_terms(0)) xs[i][e] = p;
  }
  return xs;
}

}  // namespace

WKBPhase exp_to_wkb(const std::vector<HSymbol>& x, WkbReport* rep) {
  long long det_edge = 0;
  std::vector<XiSeries> xs =
      slice_series(x, false, "exp_to_wkb", nullptr, &det_edge);
  const Truncation& tr = x[0].trunc();
  Side side{false, -tr.xi_lo};
  std::vector<XiSeries> sn = run_forward(xs, side, rep);

  WKBPhase ph;
  ph.S = HSymbol(tr, x[0].cfg());
  for (int n = 0; n <= tr.n_hbar; ++n)
    for (const auto& [e, p] : sn[n]) {
      require(e <= -1, ErrorKind::Internal,
              "exp_to_wkb: phase term with non-negative exponent");
      ph.S.add_term(n, e, p);
    }
  ph.S.restrict_det(det_edge, kDetInf);
  return ph;
}

WKBPhase exp_to_wkb(const DressingTriple& dt, WkbReport* rep) {
  return exp_to_wkb(dt.X, rep);
}

WKBPhase exp_to_wkb_bar(const std::vector<HSymbol>& xbar, const HScalar& phi,
                        WkbReport* rep) {
  require(xbar.size() == phi.size(), ErrorKind::Config,
          "exp_to_wkb_bar: phi slots do not match the slice count");
  std::vector<Rat> alphabar(xbar.size(), Rat(0));
  long long det_edge = 0;
  std::vector<XiSeries> xs =
      slice_series(xbar, true, "exp_to_wkb_bar", &alphabar, &det_edge);
  const Truncation& tr = xbar[0].trunc();
  Side side{true, tr.xi_hi};
  std::vector<XiSeries> sn = run_forward(xs, side, rep);

  WKBPhase ph;
  ph.bar = true;
  ph.alphabar = std::move(alphabar);
  ph.S = HSymbol(tr, xbar[0].cfg());
  for (int n = 0; n <= tr.n_hbar; ++n) {
    for (const auto& [e, p] : sn[n]) {
      require(e >= 1, ErrorKind::Internal,
              "exp_to_wkb_bar: series term at a non-positive exponent");
      ph.S.add_term(n, e, p);
    }
    ph.S.add_term(n, 0, phi[n]);
  }
  ph.S.restrict_det(-kDetInf, det_edge);
  return ph;
}

WKBPhase exp_to_wkb_bar(const DressingTriple& dt, WkbReport* rep) {
  WKBPhase ph = exp_to_wkb_bar(dt.Xbar, dt.phi, rep);
  ph.alphabar = dt.alphabar;
  return ph;
}

std::vector<HSymbol> wkb_to_exp(const WKBPhase& ph, WkbReport* rep) {
  require(!ph.bar, ErrorKind::Config,
          "wkb_to_exp: only unbar phases can be inverted");
  require(!ph.S.has_logxi(), ErrorKind::Check,
          "wkb_to_exp: the phase must be log-free");
  const Truncation& tr = ph.S.trunc();
  require(ph.S.det_hi() >= tr.xi_hi, ErrorKind::Window,
          "wkb_to_exp: the phase must be determined through the top of the "
          "window");
  std::vector<XiSeries> ss(tr.n_hbar + 1);
  for (int n = 0; n <= tr.n_hbar; ++n)
    for (const auto& [e, p] : ph.S.order_terms(n)) {
      require(e <= -1, ErrorKind::Check,
              "wkb_to_exp: the phase must have only negative exponents");
      ss[n][e] = p;
    }
  Side side{false, -tr.xi_lo};
  std::vector<XiSeries> xn = run_inverse(ss, side, rep);

  long long det_lo = std::max(static_cast<long long>(tr.xi_lo), ph.S.det_lo());
  std::vector<HSymbol> out;
  out.reserve(tr.n_hbar + 1);
  for (int n = 0; n <= tr.n_hbar; ++n) {
    HSymbol s(tr, ph.S.cfg());
    for (const auto& [e, p] : xn[n]) s.add_term(0, e, p);
    s.restrict_det(det_lo, kDetInf);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace hexp
