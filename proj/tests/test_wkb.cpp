#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "hexp/wkb.hpp"
#include "random_fixtures.hpp"

using namespace hexp;

namespace {

// Per-order sigma slices of a random symbol, the shape the converters eat.
std::vector<HSymbol> slices_of(const HSymbol& a) {
  std::vector<HSymbol> out;
  for (int n = 0; n <= a.trunc().n_hbar; ++n) out.push_back(a.slice(n));
  return out;
}

bool content_equal(const HSymbol& a, const HSymbol& b) {
  if (a.trunc().n_hbar != b.trunc().n_hbar) return false;
  for (int n = 0; n <= a.trunc().n_hbar; ++n) {
    if (!(a.order_terms(n) == b.order_terms(n))) return false;
    if (a.logxi(n) != b.logxi(n)) return false;
  }
  return true;
}

// hbar-Laurent series: order -> xi exponent -> coeff.  Only exponents
// outside [mlo, mhi] are dropped; that is exact because single-signed
// exponents only move outward under multiplication.  Orders are never
// clipped mid-computation: a factor at low order can pull a high-order
// cell back into the window of interest.
struct Laurent {
  int mlo, mhi;
  std::map<int, std::map<int, ScalarPoly>> cells;

  void add(int h, int m, const ScalarPoly& p) {
    if (m < mlo || m > mhi || p.is_zero()) return;
    auto& slot = cells[h];
    auto it = slot.find(m);
    if (it == slot.end()) {
      slot.emplace(m, p);
      return;
    }
    it->second += p;
    if (it->second.is_zero()) {
      slot.erase(it);
      if (slot.empty()) cells.erase(h);
    }
  }
};

Laurent laurent_mul(const Laurent& a, const Laurent& b) {
  Laurent out{a.mlo, a.mhi, {}};
  for (const auto& [ha, ra] : a.cells)
    for (const auto& [ma, pa] : ra)
      for (const auto& [hb, rb] : b.cells)
        for (const auto& [mb, pb] : rb) out.add(ha + hb, ma + mb, pa * pb);
  return out;
}

void laurent_scale(Laurent& a, const Rat& c) {
  for (auto& [h, row] : a.cells)
    for (auto& [m, p] : row) p *= c;
}

// The finished grid read off a route, restricted to orders [hlo, hhi].
std::map<std::pair<int, int>, ScalarPoly> laurent_grid(const Laurent& a,
                                                       int hlo, int hhi) {
  std::map<std::pair<int, int>, ScalarPoly> out;
  for (const auto& [h, row] : a.cells) {
    if (h < hlo || h > hhi) continue;
    for (const auto& [m, p] : row) out.emplace(std::make_pair(h, m), p);
  }
  return out;
}

// Brute-force total symbol of e^{X/hbar} as a Laurent series: the circ
// powers sum_{k<=kmax} hbar^{-k} X^{o k} / k! on a window wide enough
// that no product is ever clipped.
Laurent operator_route(const HSymbol& x_wide, int kmax, int mlo, int mhi) {
  Laurent out{mlo, mhi, {}};
  const RingConfig& cfg = x_wide.cfg();
  out.add(0, 0, ScalarPoly::one(cfg));
  for (int k = 1; k <= kmax; ++k) {
    HSymbol pw = circ_pow(x_wide, k);
    Rat w = 1 / rat_factorial(k);
    for (int n = 0; n <= pw.trunc().n_hbar; ++n)
      for (const auto& [m, p] : pw.order_terms(n)) out.add(n - k, m, p * w);
  }
  return out;
}

// e^{S/hbar} expanded pointwise from a phase.
Laurent phase_route(const HSymbol& s, int kmax, int mlo, int mhi) {
  Laurent base{mlo, mhi, {}};
  for (int n = 0; n <= s.trunc().n_hbar; ++n)
    for (const auto& [m, p] : s.order_terms(n)) base.add(n - 1, m, p);
  Laurent out{mlo, mhi, {}};
  out.add(0, 0, ScalarPoly::one(s.cfg()));
  Laurent term = out;
  for (int j = 1; j <= kmax; ++j) {
    term = laurent_mul(term, base);
    laurent_scale(term, rat_of(1, j));
    for (const auto& [h, row] : term.cells)
      for (const auto& [m, p] : row) out.add(h, m, p);
  }
  return out;
}

}  // namespace

TEST_CASE("the zero generator has the zero phase") {
  Truncation tr{2, -4, 4};
  RingConfig cfg{0, 0, 0, 0};
  std::vector<HSymbol> xs(3, HSymbol(tr, cfg));
  WkbReport rep;
  WKBPhase ph = exp_to_wkb(xs, &rep);
  CHECK(ph.S.is_zero());
  CHECK_FALSE(ph.bar);
  CHECK(rep.vanish_checks > 0);
  std::vector<HSymbol> back = wkb_to_exp(ph);
  for (const HSymbol& s : back) CHECK(s.is_zero());
}

TEST_CASE("an s-independent generator equals its phase on both sides") {
  Truncation tr{2, -4, 4};
  RingConfig cfg{2, 0, 2, 0};
  HSymbol x(tr, cfg);
  x.add_term(0, -1, ScalarPoly::constant(cfg, rat_of(3, 2)));
  x.add_term(1, -3, ScalarPoly::t_var(cfg, 2));
  x.add_term(2, -2, ScalarPoly::t_var(cfg, 1) * ScalarPoly::t_var(cfg, 1));
  WKBPhase ph = exp_to_wkb(slices_of(x));
  CHECK(content_equal(ph.S, x));

  HSymbol xb(tr, cfg);
  xb.add_term(0, 2, ScalarPoly::constant(cfg, -2));
  xb.add_term(1, 1, ScalarPoly::t_var(cfg, 1));
  WKBPhase phb = exp_to_wkb_bar(slices_of(xb), hscalar_zero(cfg, 2));
  CHECK(phb.bar);
  CHECK(content_equal(phb.S, xb));
}

// X = u xi^-1 exponentiates in closed form: the shifted coefficients
// multiply to rising factorials, sum_k (u/hbar)(u/hbar+1)...(u/hbar+k-1)
// xi^-k / k! = (1 - xi^-1)^{-u/hbar}, so S = -u log(1 - xi^-1) with no
// hbar corrections at all.  The bar mirror X = u xi gives falling
// factorials and S = u log(1 + xi).
TEST_CASE("a linear-in-u generator matches its logarithmic closed form") {
  Truncation tr{2, -5, 5};
  RingConfig cfg{0, 0, 0, 0};
  ScalarPoly u = ScalarPoly::u_pow(cfg, 1);

  HSymbol x(tr, cfg);
  x.add_term(0, -1, u);
  WKBPhase ph = exp_to_wkb(slices_of(x));
  HSymbol want(tr, cfg);
  for (int k = 1; k <= 5; ++k) want.add_term(0, -k, u * rat_of(1, k));
  CHECK(content_equal(ph.S, want));

  HSymbol xb(tr, cfg);
  xb.add_term(0, 1, u);
  WKBPhase phb = exp_to_wkb_bar(slices_of(xb), hscalar_zero(cfg, 2));
  HSymbol wantb(tr, cfg);
  for (int k = 1; k <= 5; ++k)
    wantb.add_term(0, k, u * rat_of((k % 2 == 1) ? 1 : -1, k));
  CHECK(content_equal(phb.S, wantb));
}

TEST_CASE("a single innermost-degree phase inverts to the seeded generator") {
  Truncation tr{1, -4, 4};
  RingConfig cfg{0, 0, 0, 0};
  ScalarPoly u = ScalarPoly::u_pow(cfg, 1);
  WKBPhase ph;
  ph.S = HSymbol(tr, cfg);
  ph.S.add_term(0, -1, u);
  std::vector<HSymbol> back = wkb_to_exp(ph);
  // The innermost degree is copied verbatim; the xi^-2 closing picks up
  // -(1/2) S dS/ds = u/2 with the sign flipped relative to the forward
  // direction.
  CHECK(back[0].coeff(0, -1) == u);
  CHECK(back[0].coeff(0, -2) == u * rat_of(-1, 2));
  CHECK(back[1].is_zero());
  WKBPhase again = exp_to_wkb(back);
  CHECK(content_equal(again.S, ph.S));
}

TEST_CASE("round trips are the identity on random generators") {
  RingConfig cfgs[2] = {{0, 0, 0, 0}, {2, 0, 1, 0}};
  Truncation tr{2, -6, 6};
  for (int seed = 0; seed < 50; ++seed) {
    CAPTURE(seed);
    std::mt19937 rng(2400 + seed);
    const RingConfig& cfg = cfgs[seed % 2];
    HSymbol x = fixtures::random_symbol(rng, tr, cfg, -4, -1, 2);
    std::vector<HSymbol> xs = slices_of(x);
    WkbReport rep;
    WKBPhase ph = exp_to_wkb(xs, &rep);
    std::vector<HSymbol> back = wkb_to_exp(ph, &rep);
    for (int i = 0; i <= 2; ++i) {
      CAPTURE(i);
      long cells = 0;
      CHECK(equal_on_overlap(back[i], xs[i], nullptr, &cells));
      CHECK(cells > 0);
    }
    CHECK(rep.vanish_checks > 0);
    CHECK(rep.order_checks > 0);
    CHECK(rep.prime_checks > 0);
  }
}

TEST_CASE("the phase depends only on generator slices of equal or lower order") {
  std::mt19937 rng(77);
  RingConfig cfg{1, 0, 1, 0};
  Truncation tr2{2, -5, 5};
  Truncation tr3{3, -5, 5};
  HSymbol x = fixtures::random_symbol(rng, tr2, cfg, -3, -1, 2);
  WKBPhase ph = exp_to_wkb(slices_of(x));

  // The same slices plus a random order-3 perturbation, on the wider
  // truncation.
  std::vector<HSymbol> xs3(4, HSymbol(tr3, cfg));
  for (int n = 0; n <= 2; ++n) {
    HSymbol sn = x.slice(n);
    for (const auto& [m, p] : sn.order_terms(0)) xs3[n].add_term(0, m, p);
  }
  HSymbol pert = fixtures::random_symbol(rng, tr3, cfg, -3, -1, 0);
  for (const auto& [m, p] : pert.order_terms(0)) xs3[3].add_term(0, m, p);
  WKBPhase ph3 = exp_to_wkb(xs3);

  for (int n = 0; n <= 2; ++n) {
    CAPTURE(n);
    CHECK(ph3.S.order_terms(n) == ph.S.order_terms(n));
  }
  CHECK_FALSE(ph3.S.order_terms(3).empty());
}

TEST_CASE("the operator exponential route matches the phase route") {
  // Nominal window [-4, 0]: circ powers past k = 4 sit entirely below it,
  // so both routes are finite sums there.  The operator route runs on a
  // doubled window so no product is ever clipped; the phase is computed
  // with enough extra hbar orders that every compared cell is exact.
  const int N = 2, K = 4;
  RingConfig cfgs[2] = {{0, 0, 0, 0}, {1, 0, 1, 0}};
  for (int seed = 0; seed < 10; ++seed) {
    CAPTURE(seed);
    std::mt19937 rng(3100 + seed);
    const RingConfig& cfg = cfgs[seed % 2];
    Truncation tr_wide{N + K + 1, -2 * K, 0};
    HSymbol x = fixtures::random_symbol(rng, tr_wide, cfg, -2, -1, N);
    // An order-zero anchor keeps the classical cascade nontrivial even
    // when the random cells all land at higher orders.
    x.add_term(0, -1, ScalarPoly::u_pow(cfg, 1));

    Laurent lhs = operator_route(x, K, -K, 0);

    Truncation tr_s{N + K + 1, -K, K};
    std::vector<HSymbol> xs(tr_s.n_hbar + 1, HSymbol(tr_s, cfg));
    for (int n = 0; n <= N; ++n)
      for (const auto& [m, p] : x.order_terms(n)) xs[n].add_term(0, m, p);
    WKBPhase ph = exp_to_wkb(xs);
    Laurent rhs = phase_route(ph.S, K, -K, 0);

    auto lg = laurent_grid(lhs, -K, N);
    CHECK(lg == laurent_grid(rhs, -K, N));
    CHECK(lg.size() > 5);
  }
}

TEST_CASE("the bar operator exponential route matches the mirrored phase") {
  const int N = 2, K = 4;
  RingConfig cfg{0, 0, 0, 0};
  for (int seed = 0; seed < 3; ++seed) {
    CAPTURE(seed);
    std::mt19937 rng(4500 + seed);
    Truncation tr_wide{N + K + 1, 0, 2 * K};
    HSymbol x = fixtures::random_symbol(rng, tr_wide, cfg, 1, 2, N);

    Laurent lhs = operator_route(x, K, 0, K);

    Truncation tr_s{N + K + 1, -K, K};
    std::vector<HSymbol> xs(tr_s.n_hbar + 1, HSymbol(tr_s, cfg));
    for (int n = 0; n <= N; ++n)
      for (const auto& [m, p] : x.order_terms(n)) xs[n].add_term(0, m, p);
    WKBPhase ph = exp_to_wkb_bar(xs, hscalar_zero(cfg, tr_s.n_hbar));
    Laurent rhs = phase_route(ph.S, K, 0, K);

    auto lg = laurent_grid(lhs, -K, N);
    CHECK(lg == laurent_grid(rhs, -K, N));
    CHECK(lg.size() > 5);
  }
}

TEST_CASE("the prefactor scalar fills the constant column of the bar phase") {
  Truncation tr{1, -3, 3};
  RingConfig cfg{0, 0, 0, 0};
  HScalar phi = hscalar_zero(cfg, 1);
  phi[0] = ScalarPoly::u_pow(cfg, 2);
  std::vector<HSymbol> xbs(2, HSymbol(tr, cfg));
  WKBPhase ph = exp_to_wkb_bar(xbs, phi);
  CHECK(ph.S.coeff(0, 0) == phi[0]);
  CHECK(ph.S.coeff(1, 0) == ScalarPoly::zero(cfg));
  HSymbol rest = ph.S;
  rest.add_term(0, 0, -phi[0]);
  CHECK(rest.is_zero());
}

TEST_CASE("the string datum's bar phase carries the dressing scalar") {
  Truncation tr{1, -4, 4};
  RingConfig cfg{3, 0, 1, 0};
  DressingTriple out = solve_rh(c1_string_data(tr, cfg));
  WKBPhase unbar = exp_to_wkb(out);
  CHECK(unbar.S.is_zero());

  WKBPhase ph = exp_to_wkb_bar(out);
  ScalarPoly u = ScalarPoly::u_pow(cfg, 1);
  ScalarPoly l = ScalarPoly::l_pow(cfg, 1);
  CHECK(ph.S.coeff(0, 0) == u - u * l);
  CHECK(ph.S.coeff(1, 0) == l * rat_of(1, 2));
  REQUIRE(ph.alphabar.size() == 2);
  CHECK(ph.alphabar[0] == 0);
  CHECK(ph.alphabar[1] == 0);
  // The order-zero series column is the seed itself.
  for (int n = 1; n <= 3; ++n) {
    CAPTURE(n);
    CHECK(ph.S.coeff(0, n) ==
          ScalarPoly::t_var(cfg, n) * ScalarPoly::u_pow(cfg, n));
  }
}

TEST_CASE("bar-side log slots are reported and excluded from the series") {
  Truncation tr{1, -3, 3};
  RingConfig cfg{0, 0, 0, 0};
  std::vector<HSymbol> xbs(2, HSymbol(tr, cfg));
  xbs[0].add_term(0, 1, ScalarPoly::u_pow(cfg, 1));
  xbs[1].set_logxi(0, rat_of(2, 3));
  WKBPhase ph = exp_to_wkb_bar(xbs, hscalar_zero(cfg, 1));
  REQUIRE(ph.alphabar.size() == 2);
  CHECK(ph.alphabar[0] == 0);
  CHECK(ph.alphabar[1] == rat_of(2, 3));
  CHECK_FALSE(ph.S.has_logxi());

  std::vector<HSymbol> clean = xbs;
  clean[1] = HSymbol(tr, cfg);
  WKBPhase ph2 = exp_to_wkb_bar(clean, hscalar_zero(cfg, 1));
  CHECK(content_equal(ph.S, ph2.S));
}

TEST_CASE("generators and phases on the wrong side are rejected") {
  Truncation tr{1, -3, 3};
  RingConfig cfg{0, 0, 0, 0};
  ScalarPoly u = ScalarPoly::u_pow(cfg, 1);

  std::vector<HSymbol> pos(2, HSymbol(tr, cfg));
  pos[0].add_term(0, 1, u);
  CHECK_THROWS_WITH_AS(exp_to_wkb(pos), doctest::Contains("negative shifts"),
                       Error);

  std::vector<HSymbol> neg(2, HSymbol(tr, cfg));
  neg[0].add_term(0, -1, u);
  CHECK_THROWS_WITH_AS(exp_to_wkb_bar(neg, hscalar_zero(cfg, 1)),
                       doctest::Contains("positive shifts"), Error);

  std::vector<HSymbol> logged(2, HSymbol(tr, cfg));
  logged[0].set_logxi(0, 1);
  CHECK_THROWS_WITH_AS(exp_to_wkb(logged), doctest::Contains("log-free"),
                       Error);

  WKBPhase barph;
  barph.S = HSymbol(tr, cfg);
  barph.bar = true;
  CHECK_THROWS_AS(wkb_to_exp(barph), Error);

  WKBPhase flat;
  flat.S = HSymbol(tr, cfg);
  flat.S.add_term(0, 0, u);
  CHECK_THROWS_WITH_AS(wkb_to_exp(flat),
                       doctest::Contains("negative exponents"), Error);

  std::vector<HSymbol> short_list(1, HSymbol(tr, cfg));
  try {
    exp_to_wkb(short_list);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}
