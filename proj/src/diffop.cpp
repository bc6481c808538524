#include "hexp/diffop.hpp"

namespace hexp {

namespace {

using Graded = std::vector<ScalarPoly>;

Graded gzero(const RingConfig& cfg, int n) {
  return Graded(n + 1, ScalarPoly::zero(cfg));
}

Graded gmul(const Graded& a, const Graded& b) {
  Graded out(a.size(), ScalarPoly::zero(a[0].cfg()));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (size_t j = 0; i + j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

std::vector<ScalarPoly> shift_coeff(const ScalarPoly& p, int m, int n_hbar) {
  const RingConfig& cfg = p.cfg();
  Graded out = gzero(cfg, n_hbar);
  if (m == 0) {
    out[0] = p;
    return out;
  }
  // delta = log(1 - m hbar / u) = -sum_{k>=1} (m hbar)^k u^{-k} / k.
  Graded delta = gzero(cfg, n_hbar);
  for (int k = 1; k <= n_hbar; ++k)
    delta[k] = ScalarPoly::u_pow(cfg, -k) * (-rat_pow(Rat(m), k) / Rat(k));
  for (const auto& [mon, c] : p.terms()) {
    // (u - m hbar)^q = sum_i C(q, i) (-m)^i u^{q-i} hbar^i.
    Graded upart = gzero(cfg, n_hbar);
    for (int i = 0; i <= n_hbar; ++i) {
      Rat w = rat_binom(mon.u, i) * rat_pow(Rat(-m), i);
      if (w == 0) continue;
      upart[i] = ScalarPoly::u_pow(cfg, mon.u - Rat(i)) * w;
    }
    // (l + delta)^j by repeated graded multiplication.
    Graded lpart = gzero(cfg, n_hbar);
    lpart[0] = ScalarPoly::one(cfg);
    for (int r = 0; r < mon.l; ++r) {
      Graded base = delta;
      base[0] += ScalarPoly::l_pow(cfg, 1);
      lpart = gmul(lpart, base);
    }
    Graded mono = gmul(upart, lpart);
    ScalarPoly tfac(cfg);
    Monomial tmon;
    tmon.t = mon.t;
    tmon.tbar = mon.tbar;
    tfac.add_term(tmon, c);
    for (int i = 0; i <= n_hbar; ++i) out[i] += mono[i] * tfac;
  }
  return out;
}

DiffOp::DiffOp(const Truncation& tr, const RingConfig& cfg)
    : trunc_(tr), cfg_(cfg) {}

DiffOp DiffOp::from_symbol(const HSymbol& a) {
  require(!a.has_logxi(), ErrorKind::Internal,
          "DiffOp::from_symbol on log-carrying symbol");
  require(a.det_lo() == -kDetInf && a.det_hi() == kDetInf, ErrorKind::Internal,
          "DiffOp::from_symbol needs a fully determined symbol");
  DiffOp out(a.trunc(), a.cfg());
  for (int n = 0; n <= a.trunc().n_hbar; ++n)
    for (const auto& [m, p] : a.order_terms(n)) out.add_term(m, n, p);
  return out;
}

void DiffOp::add_term(int m, int n, const ScalarPoly& p) {
  if (p.is_zero() || n > trunc_.n_hbar) return;
  require(n >= 0, ErrorKind::Internal, "negative hbar order");
  require(m >= trunc_.xi_lo && m <= trunc_.xi_hi, ErrorKind::Internal,
          "DiffOp shift " + std::to_string(m) + " outside the window");
  auto it = terms_.find(m);
  if (it == terms_.end())
    it = terms_.emplace(m, gzero(cfg_, trunc_.n_hbar)).first;
  it->second[n] += p;
}

DiffOp DiffOp::operator-() const {
  DiffOp out(trunc_, cfg_);
  for (const auto& [m, vec] : terms_)
    for (int n = 0; n <= trunc_.n_hbar; ++n)
      out.add_term(m, n, -vec[n]);
  return out;
}

DiffOp& DiffOp::operator+=(const DiffOp& rhs) {
  require(trunc_ == rhs.trunc_, ErrorKind::Config, "DiffOp shape mismatch");
  require_same_cfg(cfg_, rhs.cfg_, "DiffOp::operator+=");
  for (const auto& [m, vec] : rhs.terms_)
    for (int n = 0; n <= trunc_.n_hbar; ++n) add_term(m, n, vec[n]);
  return *this;
}

DiffOp operator*(const DiffOp& a, const DiffOp& b) {
  require(a.trunc_ == b.trunc_, ErrorKind::Config, "DiffOp shape mismatch");
  require_same_cfg(a.cfg_, b.cfg_, "DiffOp::operator*");
  int N = a.trunc_.n_hbar;
  DiffOp out(a.trunc_, a.cfg_);
  for (const auto& [ma, avec] : a.terms_) {
    for (const auto& [mb, bvec] : b.terms_) {
      // Product shifts outside the window are dropped, mirroring the
      // window clipping of the symbol product.
      if (ma + mb < a.trunc_.xi_lo || ma + mb > a.trunc_.xi_hi) continue;
      for (int q = 0; q <= N; ++q) {
        if (bvec[q].is_zero()) continue;
        auto shifted = shift_coeff(bvec[q], ma, N - q);
        for (int p = 0; p <= N - q; ++p) {
          if (avec[p].is_zero()) continue;
          for (int i = 0; p + q + i <= N; ++i)
            out.add_term(ma + mb, p + q + i, avec[p] * shifted[i]);
        }
      }
    }
  }
  return out;
}

bool DiffOp::is_zero() const {
  for (const auto& [m, vec] : terms_)
    for (const auto& p : vec)
      if (!p.is_zero()) return false;
  return true;
}

HSymbol DiffOp::total_symbol() const {
  HSymbol out(trunc_, cfg_);
  for (const auto& [m, vec] : terms_)
    for (int n = 0; n <= trunc_.n_hbar; ++n) out.add_term(n, m, vec[n]);
  return out;
}

}  // namespace hexp
