// Adjoint machinery: graded ad-series conjugation, phi conjugation, time
// conjugation, and the tilde transport maps.  Conjugations are checked
// against a difference-operator oracle that only uses the coefficient
// shift law, plus hand-computed values for the c = 1 seed data.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hexp/adjoint.hpp"
#include "hexp/diffop.hpp"
#include "laurent_oracle.hpp"
#include "random_fixtures.hpp"

using namespace hexp;
using namespace hexp::oracle;
using namespace hexp::fixtures;

namespace {

const RingConfig kCfg{.t_vars = 2, .tbar_vars = 1, .t_deg = 2, .tbar_deg = 1};
const Truncation kTr{.n_hbar = 2, .xi_lo = -4, .xi_hi = 4};

ScalarPoly U(const Rat& q) { return ScalarPoly::u_pow(kCfg, q); }
ScalarPoly L(int j) { return ScalarPoly::l_pow(kCfg, j); }
ScalarPoly T(int n) { return ScalarPoly::t_var(kCfg, n); }

// phi0 of the c = 1 seed: -u l + u, so d_s phi0 = l.
ScalarPoly c1_phi0() {
  return ScalarPoly::l_pow(kCfg, 1) * U(1) * Rat(-1) + U(1);
}

HSymbol sym_E(int m = 1) { return HSymbol::xi_pow(kTr, kCfg, m); }

}  // namespace

TEST_CASE("shift_difference of the c1 seed phi0") {
  HScalar phi = hscalar_zero(kCfg, kTr.n_hbar);
  phi[0] = c1_phi0();
  // (phi0(s) - phi0(s + m hbar)) / hbar has slot 0 equal to -m l and
  // slot r equal to m^{r+1} u^{-r} / (r (r + 1)).
  for (int m : {1, 2, -1}) {
    HScalar sd = shift_difference(phi, m);
    CHECK(sd[0] == L(1) * Rat(-m));
    for (int r = 1; r <= kTr.n_hbar; ++r) {
      Rat w = rat_pow(Rat(m), r + 1) / Rat(r * (r + 1));
      CHECK(sd[r] == U(-r) * w);
    }
  }
  HScalar sd0 = shift_difference(phi, 0);
  for (const auto& slot : sd0) CHECK(slot.is_zero());
}

TEST_CASE("coefficient shift law agrees with the derivative expansion") {
  std::mt19937 rng(404);
  for (int it = 0; it < 30; ++it) {
    ScalarPoly p = random_scalar(rng, kCfg);
    int m = pick(rng, -3, 3);
    int N = 4;
    std::vector<ScalarPoly> sub = shift_coeff(p, m, N);
    Rat mk = 1;
    Rat kfac = 1;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) {
        mk *= m;
        kfac *= k;
      }
      CHECK(sub[k] == p.d_s_pow(k) * (mk / kfac));
    }
  }
}

TEST_CASE("difference-operator product matches the circ product") {
  std::mt19937 rng(405);
  for (int it = 0; it < 25; ++it) {
    DiffOp a = random_diffop(rng, kTr, kCfg, -2, 2, kTr.n_hbar);
    DiffOp b = random_diffop(rng, kTr, kCfg, -2, 2, kTr.n_hbar);
    HSymbol lhs = (a * b).total_symbol();
    HSymbol rhs = circ(a.total_symbol(), b.total_symbol());
    std::string report;
    CHECK_MESSAGE(equal_on_overlap(lhs, rhs, &report), report);
  }
}

TEST_CASE("ad_once basics") {
  HSymbol s = HSymbol::from_scalar(kTr, kCfg, ScalarPoly::s_var(kCfg));
  // [s, E] = -hbar E, so hbar^{-1} ad is exactly -E.
  CHECK(ad_once(s, sym_E()) == -sym_E());
  // A pure log generator acts as c d_s.
  HSymbol lg(kTr, kCfg);
  lg.set_logxi(0, Rat(2));
  HSymbol a = HSymbol::xi_pow(kTr, kCfg, 3).mul_scalar(U(1));
  HSymbol expect(kTr, kCfg);
  expect.add_term(0, 3, ScalarPoly::constant(kCfg, -2));
  CHECK(ad_once(lg, a) == expect);
}

TEST_CASE("exp_ad matches the operator oracle") {
  std::mt19937 rng(406);
  Truncation wt = wide_truncation(kTr, 2);
  long total_cells = 0;
  for (int it = 0; it < 12; ++it) {
    bool bar_side = it % 2 == 1;
    int mlo = bar_side ? 1 : -3;
    int mhi = bar_side ? 3 : -1;
    DiffOp dx = random_diffop(rng, kTr, kCfg, mlo, mhi, kTr.n_hbar);
    int ja = pick(rng, -1, 1);
    HSymbol as = sym_E(ja).mul_scalar(random_scalar(rng, kCfg));
    HSymbol r1 = exp_ad(dx.total_symbol(), as);

    DiffOp wa(wt, kCfg);
    for (int n = 0; n <= kTr.n_hbar; ++n)
      if (!as.coeff_or_zero(n, ja).is_zero())
        wa.add_term(ja, n, as.coeff_or_zero(n, ja));
    DiffOp r2 = lop_conj(lop_widen(dx, wt), wa);
    std::string report;
    long cells = 0;
    CHECK_MESSAGE(lop_matches_symbol(r2, r1, &report, &cells), report);
    total_cells += cells;
  }
  CHECK(total_cells > 12 * 20);
}

TEST_CASE("exp_ad is a circ morphism") {
  std::mt19937 rng(407);
  for (int it = 0; it < 6; ++it) {
    DiffOp dx = random_diffop(rng, kTr, kCfg, -3, -1, kTr.n_hbar);
    HSymbol xs = dx.total_symbol();
    HSymbol a = random_symbol(rng, kTr, kCfg, -1, 1, kTr.n_hbar);
    HSymbol b = random_symbol(rng, kTr, kCfg, -1, 1, kTr.n_hbar);
    HSymbol lhs = exp_ad(xs, circ(a, b));
    HSymbol rhs = circ(exp_ad(xs, a), exp_ad(xs, b));
    std::string report;
    CHECK_MESSAGE(equal_on_overlap(lhs, rhs, &report), report);
  }
}

TEST_CASE("exp_ad rejects a generator without a termination certificate") {
  HSymbol bad = HSymbol::from_scalar(kTr, kCfg, U(1));
  CHECK_THROWS_AS(exp_ad(bad, sym_E()), Error);
  // Time degree >= 1 at xi^0 is fine.
  HSymbol ok = HSymbol::from_scalar(kTr, kCfg, T(1) * U(1));
  CHECK_NOTHROW(exp_ad(ok, sym_E()));
}

TEST_CASE("conj_by_phi reproduces the c1 dressing factor") {
  HScalar phi = hscalar_zero(kCfg, kTr.n_hbar);
  phi[0] = c1_phi0();
  HSymbol fbar(kTr, kCfg);
  fbar.add_term(0, 1, U(1));
  fbar.add_term(1, 1, ScalarPoly::constant(kCfg, -1));
  HSymbol got = conj_by_phi(phi, fbar);
  HSymbol expect(kTr, kCfg);
  expect.add_term(0, 1, ScalarPoly::one(kCfg));
  expect.add_term(1, 1, U(-1) * Rat(-1, 2));
  expect.add_term(2, 1, U(-2) * Rat(-5, 24));
  CHECK(got == expect);

  DiffOp dbar(kTr, kCfg);
  dbar.add_term(1, 0, U(1));
  dbar.add_term(1, 1, ScalarPoly::constant(kCfg, -1));
  std::string report;
  CHECK_MESSAGE(lop_matches_symbol(lop_conj_phi(phi, dbar), got, &report),
                report);
}

TEST_CASE("conj_by_phi matches the operator oracle on random input") {
  std::mt19937 rng(408);
  for (int it = 0; it < 10; ++it) {
    HScalar phi = hscalar_zero(kCfg, kTr.n_hbar);
    phi[0] = c1_phi0();
    if (it % 2 == 0) phi[0] = phi[0] + T(1) * U(2) * random_coeff(rng);
    for (int j = 1; j <= kTr.n_hbar; ++j)
      if (pick(rng, 0, 1) == 0) phi[j] = random_scalar(rng, kCfg);
    DiffOp a = random_diffop(rng, kTr, kCfg, -3, 3, kTr.n_hbar);
    HSymbol got = conj_by_phi(phi, a.total_symbol());
    std::string report;
    CHECK_MESSAGE(lop_matches_symbol(lop_conj_phi(phi, a), got, &report),
                  report);
  }
}

TEST_CASE("conj_by_phi is a circ morphism") {
  std::mt19937 rng(409);
  HScalar phi = hscalar_zero(kCfg, kTr.n_hbar);
  phi[0] = c1_phi0();
  phi[1] = L(1) * Rat(1, 2);
  for (int it = 0; it < 6; ++it) {
    HSymbol a = random_symbol(rng, kTr, kCfg, -2, 2, kTr.n_hbar);
    HSymbol b = random_symbol(rng, kTr, kCfg, -2, 2, kTr.n_hbar);
    HSymbol lhs = conj_by_phi(phi, circ(a, b));
    HSymbol rhs = circ(conj_by_phi(phi, a), conj_by_phi(phi, b));
    std::string report;
    CHECK_MESSAGE(equal_on_overlap(lhs, rhs, &report), report);
  }
}

TEST_CASE("conj_by_phi passes log slots through with a d_s tail") {
  HScalar phi = hscalar_zero(kCfg, kTr.n_hbar);
  phi[0] = c1_phi0();
  HSymbol a(kTr, kCfg);
  a.set_logxi(0, Rat(1));
  HSymbol got = conj_by_phi(phi, a);
  CHECK(got.logxi(0) == Rat(1));
  CHECK(got.coeff_or_zero(0, 0) == -L(1));
  CHECK(got.coeff_or_zero(1, 0).is_zero());
}

TEST_CASE("zeta symbol and time conjugation") {
  HSymbol z = zeta_symbol(kTr, kCfg, false);
  HSymbol zx(kTr, kCfg);
  zx.add_term(0, 1, T(1));
  zx.add_term(0, 2, T(2));
  CHECK(z == zx);

  HSymbol s = HSymbol::from_scalar(kTr, kCfg, ScalarPoly::s_var(kCfg));
  HSymbol m = time_conjugate(s, false);
  HSymbol mx = s;
  mx.add_term(0, 1, T(1));
  mx.add_term(0, 2, T(2) * Rat(2));
  CHECK(m == mx);
  CHECK(m.chart() == Chart::Exact);

  HSymbol mbar = time_conjugate(s, true);
  HSymbol mbx = s;
  mbx.add_term(0, -1, ScalarPoly::tbar_var(kCfg, 1) * Rat(-1));
  CHECK(mbar == mbx);

  CHECK(time_conjugate(sym_E(), false) == sym_E());

  RingConfig wide_cfg = kCfg;
  wide_cfg.t_vars = 6;
  CHECK_THROWS_AS(zeta_symbol(kTr, wide_cfg, false), Error);
}

TEST_CASE("sigma-level conjugation helpers") {
  // Xbar0 of the c1 seed: sum_n t_n u^n xi^n, here truncated to two times.
  HSymbol xbar0(kTr, kCfg);
  xbar0.add_term(0, 1, T(1) * U(1));
  xbar0.add_term(0, 2, T(2) * U(2));
  HSymbol got = exp_ad_sigma(xbar0, sym_E(-1));
  HSymbol expect = sym_E(-1);
  expect.add_term(0, 0, T(1) * Rat(-1));
  expect.add_term(0, 1, T(2) * U(1) * Rat(-2));
  CHECK(got == expect);

  ScalarPoly phi0 = c1_phi0();
  HSymbol a = HSymbol::xi_pow(kTr, kCfg, 2).mul_scalar(U(1));
  HSymbol plus = conj_by_phi0_sigma(phi0, a, 1);
  CHECK(plus.coeff_or_zero(0, 2) == U(-1));
  HSymbol back = conj_by_phi0_sigma(phi0, plus, -1);
  CHECK(back == a);
}

TEST_CASE("tilde maps invert each other") {
  std::mt19937 rng(410);
  ScalarPoly phi0 = c1_phi0();
  for (int it = 0; it < 8; ++it) {
    bool bar = it % 2 == 1;
    int mlo = bar ? 1 : -3;
    int mhi = bar ? 3 : -1;
    HSymbol x = random_symbol(rng, kTr, kCfg, mlo, mhi, 0);
    HSymbol gen0 = random_symbol(rng, kTr, kCfg, bar ? 1 : -2, bar ? 2 : -1, 0,
                                 false);
    HSymbol fwd = tilde_forward(x, gen0, bar, bar ? &phi0 : nullptr);
    HSymbol rt = tilde_inverse(fwd, gen0, bar, bar ? &phi0 : nullptr);
    std::string report;
    CHECK_MESSAGE(equal_on_overlap(rt, x, &report), report);
    HSymbol inv = tilde_inverse(x, gen0, bar, bar ? &phi0 : nullptr);
    HSymbol rt2 = tilde_forward(inv, gen0, bar, bar ? &phi0 : nullptr);
    std::string report2;
    CHECK_MESSAGE(equal_on_overlap(rt2, x, &report2), report2);
  }
}

TEST_CASE("tilde_inverse leading weights") {
  // With a single bracket surviving, the inverse map is 1 - (1/2) ad.
  HSymbol gen0(kTr, kCfg);
  gen0.add_term(0, -1, U(1));
  HSymbol x(kTr, kCfg);
  x.add_term(0, -3, U(2));
  HSymbol got = tilde_inverse(x, gen0, false);
  HSymbol expect = x;
  expect += poisson(gen0, x).mul_rat(Rat(-1, 2));
  expect += poisson(gen0, poisson(gen0, x)).mul_rat(Rat(1, 12));
  std::string report;
  CHECK_MESSAGE(equal_on_overlap(got, expect, &report), report);
}
