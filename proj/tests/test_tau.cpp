// Tau assembly: table extraction from phases, the three gradient formulas,
// potential reconstruction, and the genus parity verdicts.  Checked against
// hand-built tables, the string datum's printed values, an exact random
// potential round trip, and the bilinear free energy of the zeta datum.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hexp/tau.hpp"
#include "random_fixtures.hpp"

using namespace hexp;

namespace {

ScalarPoly U(const RingConfig& cfg, const Rat& q) {
  return ScalarPoly::u_pow(cfg, q);
}
ScalarPoly L(const RingConfig& cfg, int j) { return ScalarPoly::l_pow(cfg, j); }
ScalarPoly T(const RingConfig& cfg, int j) { return ScalarPoly::t_var(cfg, j); }
ScalarPoly Tb(const RingConfig& cfg, int j) {
  return ScalarPoly::tbar_var(cfg, j);
}

WKBPhase unbar_phase(const HSymbol& s) { return {s, false, {}}; }
WKBPhase bar_phase(const HSymbol& s) { return {s, true, {}}; }

// Random ring element touching u, l, and both time families.
ScalarPoly random_poly(std::mt19937& rng, const RingConfig& cfg) {
  ScalarPoly p = ScalarPoly::zero(cfg);
  int nterms = fixtures::pick(rng, 2, 5);
  for (int i = 0; i < nterms; ++i) {
    Monomial m;
    m.u = Rat(fixtures::pick(rng, -2, 2));
    m.l = fixtures::pick(rng, 0, 2);
    m.t.resize(cfg.t_vars, 0);
    for (int v = 0, budget = cfg.t_deg; v < cfg.t_vars && budget > 0; ++v) {
      m.t[v] = fixtures::pick(rng, 0, budget);
      budget -= m.t[v];
    }
    m.tbar.resize(cfg.tbar_vars, 0);
    for (int v = 0, budget = cfg.tbar_deg; v < cfg.tbar_vars && budget > 0;
         ++v) {
      m.tbar[v] = fixtures::pick(rng, 0, budget);
      budget -= m.tbar[v];
    }
    m.trim();
    p.add_term(m, fixtures::random_coeff(rng));
  }
  return p;
}

// The forward difference relation grad_s inverts:
// phi_n = sum_{m=1}^{n+1} (1/m!) d_s^m F_{n+1-m}.
ScalarPoly phi_from_F(const TauExpansion& te, int n) {
  ScalarPoly acc = ScalarPoly::zero(te.cfg);
  for (int m = 1; m <= n + 1; ++m)
    acc += te.F[n + 1 - m].d_s_pow(m) * (Rat(1) / rat_factorial(m));
  return acc;
}

}  // namespace

TEST_CASE("zero phases extract to zero tables with full columns") {
  Truncation tr{2, -4, 4};
  RingConfig cfg{0, 0, 0, 0};
  VTables tab = extract_v(unbar_phase(HSymbol(tr, cfg)),
                          bar_phase(HSymbol(tr, cfg)));
  CHECK(tab.n_hbar == 2);
  CHECK(tab.j_max == 4);
  CHECK(tab.jbar_max == 4);
  for (int n = 0; n <= 2; ++n) {
    CHECK(tab.phi_at(n).is_zero());
    for (int k = 1; k <= 4; ++k) {
      CHECK(tab.v_at(n, k).is_zero());
      CHECK(tab.vbar_at(n, k).is_zero());
    }
  }
  CHECK(tab.v_at(-1, 2).is_zero());
  CHECK(tab.phi_at(-1).is_zero());
}

TEST_CASE("extract_v reads off the series conventions and inverts them") {
  Truncation tr{1, -3, 3};
  RingConfig cfg{2, 0, 2, 0};
  HSymbol s(tr, cfg);
  s.add_term(0, -1, U(cfg, 2));
  s.add_term(0, -3, T(cfg, 1));
  s.add_term(1, -2, L(cfg, 1));
  HSymbol sb(tr, cfg);
  sb.add_term(0, 0, U(cfg, 1) * L(cfg, 1));
  sb.add_term(0, 2, T(cfg, 2));
  sb.add_term(1, 0, U(cfg, -1));
  sb.add_term(1, 1, U(cfg, 1));

  VTables tab = extract_v(unbar_phase(s), bar_phase(sb));
  // v_{n,k} = -k [xi^{-k}] S_n, vbar_{n,k} = k [xi^k] Sbar_n.
  CHECK(tab.v_at(0, 1) == -U(cfg, 2));
  CHECK(tab.v_at(0, 3) == T(cfg, 1) * rat_of(-3));
  CHECK(tab.v_at(1, 2) == L(cfg, 1) * rat_of(-2));
  CHECK(tab.v_at(1, 1).is_zero());
  CHECK(tab.vbar_at(0, 2) == T(cfg, 2) * rat_of(2));
  CHECK(tab.vbar_at(1, 1) == U(cfg, 1));
  CHECK(tab.phi_at(0) == U(cfg, 1) * L(cfg, 1));
  CHECK(tab.phi_at(1) == U(cfg, -1));

  // Rebuilding S_n = -sum_k xi^{-k} v_{n,k} / k reproduces the input.
  HSymbol rebuilt(tr, cfg);
  for (int n = 0; n <= 1; ++n)
    for (int k = 1; k <= tab.j_max; ++k)
      rebuilt.add_term(n, -k, tab.v_at(n, k) * rat_of(-1, k));
  for (int n = 0; n <= 1; ++n) CHECK(rebuilt.order_terms(n) == s.order_terms(n));
}

TEST_CASE("extract_v tracks determinacy and rejects mismatched phases") {
  Truncation tr{1, -4, 4};
  RingConfig cfg{0, 0, 0, 0};
  HSymbol s(tr, cfg);
  s.add_term(0, -1, U(cfg, 1));
  s.restrict_det(-2, kDetInf);
  VTables tab = extract_v(unbar_phase(s), bar_phase(HSymbol(tr, cfg)));
  CHECK(tab.j_max == 2);
  CHECK(tab.jbar_max == 4);

  CHECK_THROWS_AS(extract_v(bar_phase(s), bar_phase(HSymbol(tr, cfg))), Error);
  CHECK_THROWS_AS(
      extract_v(unbar_phase(s), unbar_phase(HSymbol(tr, cfg))), Error);
  Truncation tr2{2, -4, 4};
  CHECK_THROWS_AS(
      extract_v(unbar_phase(s), bar_phase(HSymbol(tr2, cfg))), Error);
  CHECK_THROWS_AS(tab.v_at(1, 5), Error);
  CHECK_THROWS_AS(tab.phi_at(2), Error);
}

TEST_CASE("grad_t is the column plus the lower-order convolution") {
  RingConfig cfg{2, 0, 2, 0};
  VTables tab;
  tab.cfg = cfg;
  tab.n_hbar = 1;
  tab.j_max = 2;
  tab.v = {{T(cfg, 1) * U(cfg, 1), U(cfg, 3)},
           {L(cfg, 1), U(cfg, -1)}};
  tab.vbar = {{}, {}};
  tab.phi = {ScalarPoly::zero(cfg), ScalarPoly::zero(cfg)};

  // n = 0: no lower order, the column alone.
  CHECK(grad_t(tab, 0, 1) == tab.v_at(0, 1));
  CHECK(grad_t(tab, 0, 2) == tab.v_at(0, 2));
  // j = 1: no (k, l) split of 1, the column alone.
  CHECK(grad_t(tab, 1, 1) == L(cfg, 1));
  // n = 1, j = 2: v_{1,2} + d v_{0,1} / d t_1.
  CHECK(grad_t(tab, 1, 2) == U(cfg, -1) + U(cfg, 1));
  CHECK_THROWS_AS(grad_t(tab, 2, 1), Error);
  CHECK_THROWS_AS(grad_t(tab, 0, 3), Error);
}

TEST_CASE("grad_tbar mirrors with the shifted prefactor term") {
  RingConfig cfg{0, 2, 0, 2};
  VTables tab;
  tab.cfg = cfg;
  tab.n_hbar = 1;
  tab.jbar_max = 2;
  tab.v = {{}, {}};
  tab.vbar = {{Tb(cfg, 1) * U(cfg, 1), U(cfg, 2)},
              {U(cfg, -2), L(cfg, 2)}};
  tab.phi = {Tb(cfg, 2) * U(cfg, 3), ScalarPoly::zero(cfg)};

  // n = 0: the prefactor row below is empty, so the column alone (signed).
  CHECK(grad_tbar(tab, 0, 1) == -tab.vbar_at(0, 1));
  // n = 1, j = 1: convolution empty, prefactor derivative present.
  CHECK(grad_tbar(tab, 1, 1) == -(U(cfg, -2)));
  // n = 1, j = 2: vbar_{1,2} + d phi_0 / d tbar_2 + d vbar_{0,1} / d tbar_1.
  CHECK(grad_tbar(tab, 1, 2) == -(L(cfg, 2) + U(cfg, 3) + U(cfg, 1)));

  // All-zero bar data gives zero gradients.
  VTables zero;
  zero.cfg = cfg;
  zero.n_hbar = 1;
  zero.jbar_max = 1;
  zero.v = {{}, {}};
  zero.vbar = {{ScalarPoly::zero(cfg)}, {ScalarPoly::zero(cfg)}};
  zero.phi = {ScalarPoly::zero(cfg), ScalarPoly::zero(cfg)};
  CHECK(grad_tbar(zero, 1, 1).is_zero());

  // Frozen tbar directions contribute nothing to the computed value.
  RingConfig frozen{2, 0, 2, 0};
  VTables ftab;
  ftab.cfg = frozen;
  ftab.n_hbar = 1;
  ftab.jbar_max = 1;
  ftab.v = {{}, {}};
  ftab.vbar = {{U(frozen, 1)}, {U(frozen, 2)}};
  ftab.phi = {U(frozen, 5), ScalarPoly::zero(frozen)};
  CHECK(grad_tbar(ftab, 1, 1) == -(U(frozen, 2)));
}

TEST_CASE("grad_s applies the interior-derivative Bernoulli row") {
  RingConfig cfg{0, 0, 0, 0};
  auto kt = k_coeffs(2);
  VTables tab;
  tab.cfg = cfg;
  tab.n_hbar = 2;
  tab.v = {{}, {}, {}};
  tab.vbar = {{}, {}, {}};
  tab.phi = {U(cfg, 1), U(cfg, 2), U(cfg, 3)};

  CHECK(grad_s(tab, 0, kt) == U(cfg, 1));
  // phi_1 - (1/2) d_s phi_0 with d_s u = -1.
  CHECK(grad_s(tab, 1, kt) ==
        U(cfg, 2) + ScalarPoly::constant(cfg, rat_of(1, 2)));
  // phi_2 - (1/2) d_s phi_1 + K_2 d_s^2 phi_0; the last term vanishes.
  CHECK(grad_s(tab, 2, kt) == U(cfg, 3) + U(cfg, 1));
  CHECK_THROWS_AS(grad_s(tab, 2, std::vector<Rat>{Rat(1)}), Error);
}

TEST_CASE("the string datum reproduces the printed coefficient tables") {
  Truncation tr{2, -4, 4};
  RingConfig cfg{3, 0, 1, 0};
  DressingTriple out = solve_rh(c1_string_data(tr, cfg));
  VTables tab = extract_v(exp_to_wkb(out), exp_to_wkb_bar(out));

  ScalarPoly u = U(cfg, 1), l = L(cfg, 1);
  CHECK(tab.phi_at(0) == u - u * l);
  CHECK(tab.phi_at(1) == l * rat_of(1, 2));
  CHECK(tab.phi_at(2) == U(cfg, -1) * rat_of(-1, 12));

  // The unbar dressing is trivial here, so every v column vanishes.
  REQUIRE(tab.j_max >= 3);
  for (int n = 0; n <= 2; ++n)
    for (int k = 1; k <= tab.j_max; ++k) CHECK(tab.v_at(n, k).is_zero());

  // Order-zero bar columns: vbar_{0,k} = k t_k u^k.
  REQUIRE(tab.jbar_max >= 3);
  for (int k = 1; k <= 3; ++k)
    CHECK(tab.vbar_at(0, k) == T(cfg, k) * U(cfg, k) * Rat(k));

  // s-gradients: phi_0, then zero, then u^{-1}/12.
  auto kt = k_coeffs(2);
  CHECK(grad_s(tab, 0, kt) == u - u * l);
  CHECK(grad_s(tab, 1, kt).is_zero());
  CHECK(grad_s(tab, 2, kt) == U(cfg, -1) * rat_of(1, 12));
}

TEST_CASE("the string datum integrates to the logarithmic free energy") {
  Truncation tr{2, -4, 4};
  RingConfig cfg{3, 0, 1, 0};
  DressingTriple out = solve_rh(c1_string_data(tr, cfg));
  VTables tab = extract_v(exp_to_wkb(out), exp_to_wkb_bar(out));

  TauGradient grad = tau_gradient(tab);
  IntegrateReport rep;
  TauExpansion te = integrate_F(grad, &rep);
  CHECK(rep.pairs_checked > 0);

  ScalarPoly u2 = U(cfg, 2), l = L(cfg, 1);
  CHECK(te.F[0] == u2 * l * rat_of(1, 2) - u2 * rat_of(3, 4));
  CHECK(te.F[1].is_zero());
  CHECK(te.F[2] == l * rat_of(-1, 12));

  // Gradient invariants and the forward difference relation.
  for (int n = 0; n <= 2; ++n) {
    CHECK(te.F[n].d_s() == grad.dF_ds[n]);
    CHECK(phi_from_F(te, n) == tab.phi_at(n));
  }

  ParityReport parity = genus_parity_check(tab);
  CHECK(parity.genus_form());
  CHECK(parity.odd_orders == std::vector<int>{1});
  // The bar conditions need tbar directions this ring does not carry.
  CHECK(parity.entries_skipped == tab.jbar_max);
  CHECK(parity.summary().find("genus-form: yes") != std::string::npos);
}

TEST_CASE("integrate_F recovers a random potential exactly") {
  RingConfig cfg{2, 2, 2, 2};
  long long compared = 0;
  for (int seed = 0; seed < 25; ++seed) {
    std::mt19937 rng(5200 + seed);
    std::vector<ScalarPoly> want;
    TauGradient grad;
    grad.cfg = cfg;
    grad.n_hbar = 2;
    grad.j_max = 2;
    grad.jbar_max = 2;
    for (int n = 0; n <= 2; ++n) {
      ScalarPoly f = random_poly(rng, cfg);
      std::vector<ScalarPoly> row, rowb;
      for (int j = 1; j <= 2; ++j) row.push_back(f.d_t(j));
      for (int j = 1; j <= 2; ++j) rowb.push_back(f.d_tbar(j));
      grad.dF_dt.push_back(std::move(row));
      grad.dF_dtbar.push_back(std::move(rowb));
      grad.dF_ds.push_back(f.d_s());
      Monomial unit;
      f.add_term(unit, -f.coeff(unit));
      want.push_back(std::move(f));
    }
    IntegrateReport rep;
    TauExpansion te = integrate_F(grad, &rep);
    for (int n = 0; n <= 2; ++n) CHECK(te.F[n] == want[n]);
    CHECK(rep.pairs_skipped == 0);
    compared += rep.coeffs_checked;
  }
  CHECK(compared > 0);
}

TEST_CASE("the zeta datum has the bilinear free energy") {
  Truncation tr{2, -3, 3};
  RingConfig cfg{3, 3, 1, 1};
  HSymbol s(tr, cfg), sb(tr, cfg);
  for (int j = 1; j <= 3; ++j) {
    s.add_term(0, -j, Tb(cfg, j));
    sb.add_term(0, j, T(cfg, j));
  }
  VTables tab = extract_v(unbar_phase(s), bar_phase(sb));
  for (int j = 1; j <= 3; ++j) {
    CHECK(tab.v_at(0, j) == Tb(cfg, j) * rat_of(-j));
    CHECK(tab.vbar_at(0, j) == T(cfg, j) * Rat(j));
  }

  IntegrateReport rep;
  TauExpansion te = integrate_F(tau_gradient(tab), &rep);
  ScalarPoly want = ScalarPoly::zero(cfg);
  for (int j = 1; j <= 3; ++j) want -= T(cfg, j) * Tb(cfg, j) * Rat(j);
  CHECK(te.F[0] == want);
  CHECK(te.F[1].is_zero());
  CHECK(te.F[2].is_zero());
  CHECK(rep.coeffs_checked > 0);

  ParityReport parity = genus_parity_check(tab);
  CHECK(parity.genus_form());
  CHECK(parity.entries_checked > 0);
}

TEST_CASE("integrate_F rejects an inconsistent gradient naming the pair") {
  RingConfig cfg{1, 0, 2, 0};
  TauGradient grad;
  grad.cfg = cfg;
  grad.n_hbar = 0;
  grad.j_max = 1;
  // d_s(t1 u^2) next to a corrupted t1 column.
  grad.dF_ds = {T(cfg, 1) * U(cfg, 1) * rat_of(-2)};
  grad.dF_dt = {{U(cfg, 2) + U(cfg, 3)}};
  grad.dF_dtbar = {{}};
  CHECK_THROWS_WITH_AS(integrate_F(grad),
                       "cross-derivative mismatch (s, t1) at hbar order 0",
                       Error);
  try {
    integrate_F(grad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Check);
  }
}

TEST_CASE("trust-boundary slices are skipped and counted, not failed") {
  RingConfig cfg{2, 0, 1, 0};
  TauGradient grad;
  grad.cfg = cfg;
  grad.n_hbar = 1;
  grad.j_max = 2;
  ScalarPoly z = ScalarPoly::zero(cfg);
  grad.dF_ds = {z, z};
  // The (n = 1, j = 2) entry only trusts time degree zero; plant degree-one
  // content that no other component can corroborate.
  grad.dF_dt = {{z, z}, {z, T(cfg, 1) * U(cfg, 1)}};
  grad.dF_dtbar = {{}, {}};

  IntegrateReport rep;
  TauExpansion te = integrate_F(grad, &rep);
  CHECK(te.F[1].is_zero());
  CHECK(rep.coeffs_skipped >= 2);
  CHECK(rep.pairs_skipped == 1);
}

TEST_CASE("genus parity verdicts") {
  RingConfig cfg{0, 0, 0, 0};

  // Odd rows identically zero and a constant phi_0, so the odd s-condition
  // phi_1 - (1/2) d_s phi_0 closes without cancellation: even expansion.
  VTables even;
  even.cfg = cfg;
  even.n_hbar = 2;
  even.v = {{}, {}, {}};
  even.vbar = {{}, {}, {}};
  even.phi = {ScalarPoly::constant(cfg, 5), ScalarPoly::zero(cfg), U(cfg, -1)};
  ParityReport yes = genus_parity_check(even);
  CHECK(yes.genus_form());
  CHECK(yes.odd_orders == std::vector<int>{1});
  CHECK(yes.entries_checked == 1);
  CHECK(yes.summary().find("genus-form: yes") != std::string::npos);

  // A surviving phi_1 over phi_0 = 0 violates the s-condition.
  VTables odd;
  odd.cfg = cfg;
  odd.n_hbar = 1;
  odd.v = {{}, {}};
  odd.vbar = {{}, {}};
  odd.phi = {ScalarPoly::zero(cfg), U(cfg, 1)};
  ParityReport no = genus_parity_check(odd);
  CHECK_FALSE(no.genus_form());
  CHECK_FALSE(no.s_ok);
  CHECK(no.t_ok);
  CHECK(no.summary().find("genus-form: no") != std::string::npos);
}
