#include "hexp/symbol.hpp"

#include <algorithm>
#include <sstream>

namespace hexp {

long long det_add(long long a, long long b) {
  if (a == -kDetInf || b == -kDetInf) return -kDetInf;
  if (a == kDetInf || b == kDetInf) return kDetInf;
  long long s = a + b;
  if (s > kDetInf) return kDetInf;
  if (s < -kDetInf) return -kDetInf;
  return s;
}

namespace {

std::string det_bound_str(long long v) {
  if (v == kDetInf) return "inf";
  if (v == -kDetInf) return "-inf";
  return std::to_string(v);
}

// Possible-nonzero exponent range: stored support widened to infinity on
// any side with an unknown region.  lo > hi encodes "certainly zero".
struct Reach {
  long long lo = kDetInf;
  long long hi = -kDetInf;
  bool empty() const { return lo > hi; }
};

Reach reach_of(const HSymbol& a, bool include_log) {
  Reach r;
  if (!a.supp_empty()) {
    r.lo = a.supp_lo();
    r.hi = a.supp_hi();
  }
  if (include_log && a.has_logxi()) {
    r.lo = std::min(r.lo, 0LL);
    r.hi = std::max(r.hi, 0LL);
  }
  if (a.det_lo() > -kDetInf) r.lo = -kDetInf;
  if (a.det_hi() < kDetInf) r.hi = kDetInf;
  return r;
}

// Determinacy interval of a product-shaped operation (exponents add):
// the result is unknown wherever an unknown exponent of one factor meets
// a possibly-nonzero exponent of the other.
void product_det(const HSymbol& a, const HSymbol& b, bool logs,
                 long long& dlo, long long& dhi) {
  Reach ra = reach_of(a, logs);
  Reach rb = reach_of(b, logs);
  long long unk_top = -kDetInf;  // top of the (-inf, .] unknown set
  long long unk_bot = kDetInf;   // bottom of the [., +inf) unknown set
  if (a.det_lo() > -kDetInf && !rb.empty())
    unk_top = std::max(unk_top, det_add(a.det_lo() - 1, rb.hi));
  if (b.det_lo() > -kDetInf && !ra.empty())
    unk_top = std::max(unk_top, det_add(b.det_lo() - 1, ra.hi));
  if (a.det_hi() < kDetInf && !rb.empty())
    unk_bot = std::min(unk_bot, det_add(a.det_hi() + 1, rb.lo));
  if (b.det_hi() < kDetInf && !ra.empty())
    unk_bot = std::min(unk_bot, det_add(b.det_hi() + 1, ra.lo));
  dlo = (unk_top == -kDetInf) ? -kDetInf : unk_top + 1;
  dhi = (unk_bot == kDetInf) ? kDetInf : unk_bot - 1;
}

// Shared accumulation grid with window-clip tracking.
struct Acc {
  const Truncation& tr;
  std::vector<std::map<int, ScalarPoly>> slots;
  bool clip_lo = false;
  bool clip_hi = false;

  explicit Acc(const Truncation& t) : tr(t), slots(t.n_hbar + 1) {}

  void add(int n, long long m, const ScalarPoly& p) {
    if (p.is_zero()) return;
    if (n > tr.n_hbar) return;  // hbar truncation is exact
    if (m < tr.xi_lo) {
      clip_lo = true;
      return;
    }
    if (m > tr.xi_hi) {
      clip_hi = true;
      return;
    }
    auto [it, inserted] = slots[n].emplace((int)m, p);
    if (!inserted) it->second += p;
  }
};

HSymbol mul_impl(const HSymbol& a, const HSymbol& b, bool taylor,
                 const char* where) {
  require_same_shape(a, b, where);
  require(!a.has_logxi() && !b.has_logxi(), ErrorKind::Internal,
          std::string(where) + " on a log-carrying symbol");
  const Truncation& tr = a.trunc();
  int N = tr.n_hbar;
  Acc acc(tr);
  for (int p = 0; p <= N; ++p) {
    for (const auto& [ma, pa] : a.order_terms(p)) {
      for (int q = 0; q + p <= N; ++q) {
        ScalarPoly db(b.cfg());
        bool have_db = false;
        int nmax = taylor ? N - p - q : 0;
        for (const auto& [mb, pb] : b.order_terms(q)) {
          db = pb;
          have_db = true;
          Rat mpow(1);
          for (int n = 0; n <= nmax; ++n) {
            if (n > 0) {
              db = db.d_s();
              mpow *= Rat(ma);
              if (mpow == 0 || db.is_zero()) break;
            }
            acc.add(p + q + n, (long long)ma + mb,
                    pa * db * (mpow / rat_factorial(n)));
          }
        }
        (void)have_db;
      }
    }
  }
  long long dlo, dhi;
  product_det(a, b, false, dlo, dhi);
  HSymbol out(tr, a.cfg());
  for (int n = 0; n <= N; ++n)
    for (auto& [m, p0] : acc.slots[n]) out.add_term(n, m, p0);
  if (acc.clip_lo) dlo = std::max(dlo, (long long)tr.xi_lo);
  if (acc.clip_hi) dhi = std::min(dhi, (long long)tr.xi_hi);
  out.restrict_det(dlo, dhi);
  return out;
}

}  // namespace

HSymbol::HSymbol(const Truncation& tr, const RingConfig& cfg)
    : trunc_(tr),
      cfg_(cfg),
      orders_(tr.n_hbar + 1),
      logxi_(tr.n_hbar + 1, Rat(0)) {
  require(tr.n_hbar >= 0 && tr.xi_lo <= tr.xi_hi, ErrorKind::Config,
          "bad truncation");
}

HSymbol HSymbol::one(const Truncation& tr, const RingConfig& cfg) {
  return constant(tr, cfg, 1);
}

HSymbol HSymbol::constant(const Truncation& tr, const RingConfig& cfg,
                          const Rat& c) {
  return xi_pow(tr, cfg, 0, 0, c);
}

HSymbol HSymbol::xi_pow(const Truncation& tr, const RingConfig& cfg, int m,
                        int n, const Rat& c) {
  HSymbol out(tr, cfg);
  out.add_term(n, m, ScalarPoly::constant(cfg, c));
  return out;
}

HSymbol HSymbol::from_scalar(const Truncation& tr, const RingConfig& cfg,
                             const ScalarPoly& p, int n) {
  HSymbol out(tr, cfg);
  out.add_term(n, 0, p);
  return out;
}

Chart HSymbol::chart() const {
  bool lo_inf = det_lo_ == -kDetInf;
  bool hi_inf = det_hi_ == kDetInf;
  if (lo_inf && hi_inf) return Chart::Exact;
  if (hi_inf) return Chart::AtInfinity;  // unknown tail toward xi^-inf
  if (lo_inf) return Chart::AtZero;      // unknown tail toward xi^+inf
  return Chart::Window;
}

bool HSymbol::determined(int m) const {
  return m >= trunc_.xi_lo && m <= trunc_.xi_hi && m >= det_lo_ &&
         m <= det_hi_;
}

ScalarPoly HSymbol::coeff(int n, int m) const {
  require(n >= 0 && n <= trunc_.n_hbar, ErrorKind::Internal,
          "hbar order out of range");
  if (!determined(m))
    fail(ErrorKind::Window, "coefficient of xi^" + std::to_string(m) +
                                " is not determined (det " + det_str() + ")");
  return coeff_or_zero(n, m);
}

ScalarPoly HSymbol::coeff_or_zero(int n, int m) const {
  if (n < 0 || n > trunc_.n_hbar) return ScalarPoly::zero(cfg_);
  auto it = orders_[n].find(m);
  return it == orders_[n].end() ? ScalarPoly::zero(cfg_) : it->second;
}

const Rat& HSymbol::logxi(int n) const {
  require(n >= 0 && n <= trunc_.n_hbar, ErrorKind::Internal,
          "hbar order out of range");
  return logxi_[n];
}

void HSymbol::set_logxi(int n, const Rat& c) {
  require(n >= 0 && n <= trunc_.n_hbar, ErrorKind::Internal,
          "hbar order out of range");
  logxi_[n] = c;
}

bool HSymbol::has_logxi() const {
  for (const auto& c : logxi_)
    if (c != 0) return true;
  return false;
}

const std::map<int, ScalarPoly>& HSymbol::order_terms(int n) const {
  require(n >= 0 && n <= trunc_.n_hbar, ErrorKind::Internal,
          "hbar order out of range");
  return orders_[n];
}

void HSymbol::add_term(int n, int m, const ScalarPoly& p) {
  if (p.is_zero() || n > trunc_.n_hbar) return;
  require(n >= 0, ErrorKind::Internal, "negative hbar order");
  require_same_cfg(cfg_, p.cfg(), "HSymbol::add_term");
  if (m < trunc_.xi_lo) {
    det_lo_ = std::max(det_lo_, (long long)trunc_.xi_lo);
    normalize();
    return;
  }
  if (m > trunc_.xi_hi) {
    det_hi_ = std::min(det_hi_, (long long)trunc_.xi_hi);
    normalize();
    return;
  }
  if (m < det_lo_ || m > det_hi_) return;  // undetermined cell: ignore
  auto [it, inserted] = orders_[n].emplace(m, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) orders_[n].erase(it);
  }
}

void HSymbol::restrict_det(long long lo, long long hi) {
  det_lo_ = std::max(det_lo_, lo);
  det_hi_ = std::min(det_hi_, hi);
  normalize();
}

void HSymbol::normalize() {
  for (auto& slot : orders_) {
    for (auto it = slot.begin(); it != slot.end();) {
      if (it->second.is_zero() || it->first < det_lo_ || it->first > det_hi_)
        it = slot.erase(it);
      else
        ++it;
    }
  }
}

bool HSymbol::is_zero() const {
  for (const auto& slot : orders_)
    if (!slot.empty()) return false;
  return !has_logxi();
}

int HSymbol::hbar_order() const {
  for (int n = trunc_.n_hbar; n >= 0; --n)
    if (!orders_[n].empty() || logxi_[n] != 0) return n;
  return -1;
}

int HSymbol::supp_lo() const {
  require(!supp_empty(), ErrorKind::Internal, "support of zero symbol");
  int lo = trunc_.xi_hi;
  for (const auto& slot : orders_)
    if (!slot.empty()) lo = std::min(lo, slot.begin()->first);
  return lo;
}

int HSymbol::supp_hi() const {
  require(!supp_empty(), ErrorKind::Internal, "support of zero symbol");
  int hi = trunc_.xi_lo;
  for (const auto& slot : orders_)
    if (!slot.empty()) hi = std::max(hi, slot.rbegin()->first);
  return hi;
}

bool HSymbol::supp_empty() const {
  for (const auto& slot : orders_)
    if (!slot.empty()) return false;
  return true;
}

HSymbol HSymbol::operator-() const {
  HSymbol out = *this;
  for (auto& slot : out.orders_)
    for (auto& [m, p] : slot) p = -p;
  for (auto& c : out.logxi_) c = -c;
  return out;
}

HSymbol& HSymbol::operator+=(const HSymbol& rhs) {
  require_same_shape(*this, rhs, "HSymbol::operator+=");
  restrict_det(rhs.det_lo_, rhs.det_hi_);
  for (int n = 0; n <= trunc_.n_hbar; ++n) {
    for (const auto& [m, p] : rhs.orders_[n]) add_term(n, m, p);
    logxi_[n] += rhs.logxi_[n];
  }
  return *this;
}

HSymbol& HSymbol::operator-=(const HSymbol& rhs) {
  *this += -rhs;
  return *this;
}

bool HSymbol::operator==(const HSymbol& rhs) const {
  require_same_shape(*this, rhs, "HSymbol::operator==");
  return det_lo_ == rhs.det_lo_ && det_hi_ == rhs.det_hi_ &&
         orders_ == rhs.orders_ && logxi_ == rhs.logxi_;
}

HSymbol HSymbol::mul_rat(const Rat& c) const {
  HSymbol out = *this;
  if (c == 0) {
    for (auto& slot : out.orders_) slot.clear();
    for (auto& l : out.logxi_) l = 0;
    return out;
  }
  for (auto& slot : out.orders_)
    for (auto& [m, p] : slot) p *= c;
  for (auto& l : out.logxi_) l *= c;
  return out;
}

HSymbol HSymbol::mul_scalar(const ScalarPoly& p) const {
  require(!has_logxi() || p.is_constant(), ErrorKind::Internal,
          "scalar multiple of a log slot must stay constant");
  require_same_cfg(cfg_, p.cfg(), "HSymbol::mul_scalar");
  HSymbol out(trunc_, cfg_);
  out.det_lo_ = det_lo_;
  out.det_hi_ = det_hi_;
  for (int n = 0; n <= trunc_.n_hbar; ++n) {
    for (const auto& [m, q] : orders_[n]) out.add_term(n, m, q * p);
    if (logxi_[n] != 0 && !p.is_zero())
      out.logxi_[n] = logxi_[n] * p.constant_value();
  }
  return out;
}

HSymbol HSymbol::mul_hbar(int k) const {
  require(k >= 0, ErrorKind::Internal, "mul_hbar with negative power");
  HSymbol out(trunc_, cfg_);
  out.det_lo_ = det_lo_;
  out.det_hi_ = det_hi_;
  for (int n = 0; n + k <= trunc_.n_hbar; ++n) {
    for (const auto& [m, p] : orders_[n]) out.add_term(n + k, m, p);
    out.logxi_[n + k] = logxi_[n];
  }
  return out;
}

HSymbol HSymbol::d_s() const {
  HSymbol out(trunc_, cfg_);
  out.det_lo_ = det_lo_;
  out.det_hi_ = det_hi_;
  for (int n = 0; n <= trunc_.n_hbar; ++n)
    for (const auto& [m, p] : orders_[n]) out.add_term(n, m, p.d_s());
  return out;  // log slots are rational constants: they differentiate away
}

HSymbol HSymbol::d_t(int j) const {
  HSymbol out(trunc_, cfg_);
  out.det_lo_ = det_lo_;
  out.det_hi_ = det_hi_;
  for (int n = 0; n <= trunc_.n_hbar; ++n)
    for (const auto& [m, p] : orders_[n]) out.add_term(n, m, p.d_t(j));
  return out;
}

HSymbol HSymbol::d_tbar(int j) const {
  HSymbol out(trunc_, cfg_);
  out.det_lo_ = det_lo_;
  out.det_hi_ = det_hi_;
  for (int n = 0; n <= trunc_.n_hbar; ++n)
    for (const auto& [m, p] : orders_[n]) out.add_term(n, m, p.d_tbar(j));
  return out;
}

HSymbol HSymbol::truncate_degree(int dt, int dtb) const {
  HSymbol out = *this;
  for (auto& slot : out.orders_) {
    for (auto it = slot.begin(); it != slot.end();) {
      it->second = it->second.truncate_degree(dt, dtb);
      if (it->second.is_zero())
        it = slot.erase(it);
      else
        ++it;
    }
  }
  return out;
}

HSymbol HSymbol::d_xi() const {
  HSymbol out(trunc_, cfg_);
  bool clip_lo = false;
  for (int n = 0; n <= trunc_.n_hbar; ++n) {
    for (const auto& [m, p] : orders_[n]) {
      if (m == 0) continue;
      if (m - 1 < trunc_.xi_lo) {
        clip_lo = true;
        continue;
      }
      out.add_term(n, m - 1, p * Rat(m));
    }
    if (logxi_[n] != 0) {
      if (-1 < trunc_.xi_lo)
        clip_lo = true;
      else
        out.add_term(n, -1, ScalarPoly::constant(cfg_, logxi_[n]));
    }
  }
  long long dlo = det_add(det_lo_, -1);
  long long dhi = det_add(det_hi_, -1);
  if (clip_lo) dlo = std::max(dlo, (long long)trunc_.xi_lo);
  out.restrict_det(dlo, dhi);
  return out;
}

HSymbol HSymbol::euler() const {
  HSymbol out(trunc_, cfg_);
  out.det_lo_ = det_lo_;
  out.det_hi_ = det_hi_;
  for (int n = 0; n <= trunc_.n_hbar; ++n) {
    for (const auto& [m, p] : orders_[n])
      if (m != 0) out.add_term(n, m, p * Rat(m));
    if (logxi_[n] != 0)
      out.add_term(n, 0, ScalarPoly::constant(cfg_, logxi_[n]));
  }
  return out;
}

HSymbol HSymbol::project(long long lo, long long hi) const {
  require(!has_logxi(), ErrorKind::Internal, "project on log-carrying symbol");
  HSymbol out(trunc_, cfg_);
  out.det_lo_ = (lo == -kDetInf) ? det_lo_
                : (det_lo_ <= lo) ? -kDetInf
                                  : det_lo_;
  out.det_hi_ = (hi == kDetInf) ? det_hi_
                : (det_hi_ >= hi) ? kDetInf
                                  : det_hi_;
  for (int n = 0; n <= trunc_.n_hbar; ++n)
    for (const auto& [m, p] : orders_[n])
      if (m >= lo && m <= hi) out.add_term(n, m, p);
  out.normalize();
  return out;
}

HSymbol HSymbol::sigma() const { return slice(0); }

HSymbol HSymbol::slice(int n) const {
  require(n >= 0 && n <= trunc_.n_hbar, ErrorKind::Internal,
          "hbar order out of range");
  HSymbol out(trunc_, cfg_);
  out.det_lo_ = det_lo_;
  out.det_hi_ = det_hi_;
  for (const auto& [m, p] : orders_[n]) out.add_term(0, m, p);
  out.logxi_[0] = logxi_[n];
  return out;
}

bool HSymbol::is_sigma() const {
  for (int n = 1; n <= trunc_.n_hbar; ++n)
    if (!orders_[n].empty() || logxi_[n] != 0) return false;
  return true;
}

std::string HSymbol::str() const {
  std::ostringstream os;
  bool any = false;
  for (int n = 0; n <= trunc_.n_hbar; ++n) {
    if (orders_[n].empty() && logxi_[n] == 0) continue;
    if (any) os << "\n";
    any = true;
    os << "hbar^" << n << ":";
    bool first = true;
    for (const auto& [m, p] : orders_[n]) {
      os << (first ? " " : " + ");
      first = false;
      os << "(" << p.str() << ")";
      if (m == 1)
        os << "*xi";
      else if (m != 0)
        os << "*xi^" << m;
    }
    if (logxi_[n] != 0) {
      os << (first ? " " : " + ");
      os << "(" << rat_str(logxi_[n]) << ")*log(xi)";
    }
  }
  if (!any) return "0";
  return os.str();
}

std::string HSymbol::det_str() const {
  return "[" + det_bound_str(det_lo_) + ".." + det_bound_str(det_hi_) + "]";
}

void require_same_shape(const HSymbol& a, const HSymbol& b,
                        const char* where) {
  require(a.trunc() == b.trunc(), ErrorKind::Config,
          std::string("truncation mismatch in ") + where);
  require_same_cfg(a.cfg(), b.cfg(), where);
}

void require_sigma(const HSymbol& a, const char* where) {
  require(a.is_sigma(), ErrorKind::Internal,
          std::string(where) + " expects an hbar^0 slice");
}

HSymbol circ(const HSymbol& a, const HSymbol& b) {
  return mul_impl(a, b, true, "circ");
}

HSymbol ptmul(const HSymbol& a, const HSymbol& b) {
  return mul_impl(a, b, false, "ptmul");
}

HSymbol poisson(const HSymbol& a, const HSymbol& b) {
  require_same_shape(a, b, "poisson");
  require_sigma(a, "poisson");
  require_sigma(b, "poisson");
  const Truncation& tr = a.trunc();
  Acc acc(tr);
  for (const auto& [ma, pa] : a.order_terms(0)) {
    ScalarPoly dpa = pa.d_s();
    for (const auto& [mb, pb] : b.order_terms(0)) {
      ScalarPoly term = pa * pb.d_s() * Rat(ma) - dpa * pb * Rat(mb);
      acc.add(0, (long long)ma + mb, term);
    }
  }
  if (a.logxi(0) != 0)
    for (const auto& [mb, pb] : b.order_terms(0))
      acc.add(0, mb, pb.d_s() * a.logxi(0));
  if (b.logxi(0) != 0)
    for (const auto& [ma, pa] : a.order_terms(0))
      acc.add(0, ma, pa.d_s() * (-b.logxi(0)));
  long long dlo, dhi;
  product_det(a, b, true, dlo, dhi);
  HSymbol out(tr, a.cfg());
  for (auto& [m, p] : acc.slots[0]) out.add_term(0, m, p);
  if (acc.clip_lo) dlo = std::max(dlo, (long long)tr.xi_lo);
  if (acc.clip_hi) dhi = std::min(dhi, (long long)tr.xi_hi);
  out.restrict_det(dlo, dhi);
  return out;
}

HSymbol antideriv_xi(const HSymbol& a, Rat* log_coeff) {
  require_sigma(a, "antideriv_xi");
  const Truncation& tr = a.trunc();
  require(a.determined(-1), ErrorKind::Window,
          "xi^-1 coefficient undetermined; cannot extract the log slot");
  HSymbol out(tr, a.cfg());
  bool clip_hi = false;
  for (const auto& [m, p] : a.order_terms(0)) {
    if (m == -1) {
      require(p.is_constant(), ErrorKind::Check,
              "xi^-1 coefficient of the integrand must be constant, got " +
                  p.str());
      if (log_coeff) *log_coeff = p.constant_value();
      continue;
    }
    if (m + 1 > tr.xi_hi) {
      clip_hi = true;
      continue;
    }
    out.add_term(0, m + 1, p * (Rat(1) / Rat(m + 1)));
  }
  if (log_coeff && a.coeff_or_zero(0, -1).is_zero()) *log_coeff = 0;
  long long dlo = det_add(a.det_lo(), 1);
  long long dhi = det_add(a.det_hi(), 1);
  if (clip_hi) dhi = std::min(dhi, (long long)tr.xi_hi);
  out.restrict_det(dlo, dhi);
  return out;
}

HSymbol circ_pow(const HSymbol& a, int n) {
  if (n < 0) return circ_pow(invert(a), -n);
  HSymbol acc = HSymbol::one(a.trunc(), a.cfg());
  for (int i = 0; i < n; ++i) acc = circ(acc, a);
  return acc;
}

HSymbol invert(const HSymbol& a) {
  require(!a.has_logxi(), ErrorKind::Internal, "invert on log-carrying symbol");
  const Truncation& tr = a.trunc();
  const auto& s0 = a.order_terms(0);
  require(!s0.empty(), ErrorKind::Check, "invert: zero hbar^0 part");
  bool top;
  if (a.det_hi() == kDetInf)
    top = true;
  else if (a.det_lo() == -kDetInf)
    top = false;
  else
    fail(ErrorKind::Window,
         "invert needs a certified leading end, det " + a.det_str());
  int B = top ? s0.rbegin()->first : s0.begin()->first;
  const ScalarPoly& lead = top ? s0.rbegin()->second : s0.begin()->second;
  require(lead.terms().size() == 1, ErrorKind::Check,
          "invert: leading coefficient is not a monomial: " + lead.str());
  const auto& [lm, lc] = *lead.terms().begin();
  require(lm.t_degree() == 0 && lm.tbar_degree() == 0 && lm.l == 0,
          ErrorKind::Check,
          "invert: leading coefficient is not a unit: " + lead.str());
  require(-B >= tr.xi_lo && -B <= tr.xi_hi, ErrorKind::Window,
          "invert: leading inverse exponent xi^" + std::to_string(-B) +
              " falls outside the storage window");
  Rat c = lc;
  Rat q = lm.u;
  // First-order inverse x0 with lead circ x0 == 1 exactly:
  // x0 = (1/c) sum_j C(-q, j) B^j hbar^j u^{-q-j} xi^{-B}.
  HSymbol x0(tr, a.cfg());
  for (int j = 0; j <= tr.n_hbar; ++j) {
    Rat w = rat_binom(-q, j) * rat_pow(Rat(B), j) / c;
    if (w == 0) continue;
    x0.add_term(j, -B, ScalarPoly::u_pow(a.cfg(), -q - Rat(j)) * w);
  }
  HSymbol e = HSymbol::one(tr, a.cfg()) - circ(a, x0);
  HSymbol acc = HSymbol::one(tr, a.cfg());
  acc.restrict_det(e.det_lo(), e.det_hi());
  HSymbol epow = e;
  int guard = (tr.xi_hi - tr.xi_lo + 1) + tr.n_hbar + a.cfg().t_deg +
              a.cfg().tbar_deg + 4;
  int iter = 0;
  while (!epow.is_zero()) {
    require(iter++ <= guard, ErrorKind::Internal,
            "invert: geometric series did not terminate");
    acc += epow;
    epow = circ(epow, e);
  }
  return circ(x0, acc);
}

HSymbol invert_sigma(const HSymbol& a) {
  require_sigma(a, "invert_sigma");
  require(!a.has_logxi(), ErrorKind::Internal,
          "invert_sigma on log-carrying symbol");
  const Truncation& tr = a.trunc();
  const auto& s0 = a.order_terms(0);
  require(!s0.empty(), ErrorKind::Check, "invert_sigma: zero input");
  bool top;
  if (a.det_hi() == kDetInf)
    top = true;
  else if (a.det_lo() == -kDetInf)
    top = false;
  else
    fail(ErrorKind::Window,
         "invert_sigma needs a certified leading end, det " + a.det_str());
  int B = top ? s0.rbegin()->first : s0.begin()->first;
  const ScalarPoly& lead = top ? s0.rbegin()->second : s0.begin()->second;
  require(lead.terms().size() == 1, ErrorKind::Check,
          "invert_sigma: leading coefficient is not a monomial: " + lead.str());
  const auto& [lm, lc] = *lead.terms().begin();
  require(lm.t_degree() == 0 && lm.tbar_degree() == 0 && lm.l == 0,
          ErrorKind::Check,
          "invert_sigma: leading coefficient is not a unit: " + lead.str());
  require(-B >= tr.xi_lo && -B <= tr.xi_hi, ErrorKind::Window,
          "invert_sigma: leading inverse exponent xi^" + std::to_string(-B) +
              " falls outside the storage window");
  HSymbol x0(tr, a.cfg());
  x0.add_term(0, -B, ScalarPoly::u_pow(a.cfg(), -lm.u) * (Rat(1) / lc));
  HSymbol e = HSymbol::one(tr, a.cfg()) - ptmul(a, x0);
  HSymbol acc = HSymbol::one(tr, a.cfg());
  acc.restrict_det(e.det_lo(), e.det_hi());
  HSymbol epow = e;
  int guard = (tr.xi_hi - tr.xi_lo + 1) + a.cfg().t_deg + a.cfg().tbar_deg + 4;
  int iter = 0;
  while (!epow.is_zero()) {
    require(iter++ <= guard, ErrorKind::Internal,
            "invert_sigma: geometric series did not terminate");
    acc += epow;
    epow = ptmul(epow, e);
  }
  return ptmul(x0, acc);
}

HSymbol with_truncation(const HSymbol& a, const Truncation& tr2) {
  require(tr2.xi_lo <= a.trunc().xi_lo && tr2.xi_hi >= a.trunc().xi_hi,
          ErrorKind::Internal, "with_truncation cannot shrink the xi window");
  HSymbol out(tr2, a.cfg());
  int top = std::min(a.trunc().n_hbar, tr2.n_hbar);
  for (int n = 0; n <= top; ++n) {
    for (const auto& [m, p] : a.order_terms(n)) out.add_term(n, m, p);
    out.set_logxi(n, a.logxi(n));
  }
  out.restrict_det(a.det_lo(), a.det_hi());
  return out;
}

bool equal_on_overlap(const HSymbol& a, const HSymbol& b, std::string* report,
                      long* cells, int dt, int dtb) {
  require_same_shape(a, b, "equal_on_overlap");
  const Truncation& tr = a.trunc();
  long long lo = std::max({a.det_lo(), b.det_lo(), (long long)tr.xi_lo});
  long long hi = std::min({a.det_hi(), b.det_hi(), (long long)tr.xi_hi});
  int dtt = dt >= 0 ? dt : a.cfg().t_deg;
  int dtbt = dtb >= 0 ? dtb : a.cfg().tbar_deg;
  bool ok = true;
  long count = 0;
  for (int n = 0; n <= tr.n_hbar; ++n) {
    for (long long m = lo; m <= hi; ++m) {
      ScalarPoly pa = a.coeff_or_zero(n, (int)m).truncate_degree(dtt, dtbt);
      ScalarPoly pb = b.coeff_or_zero(n, (int)m).truncate_degree(dtt, dtbt);
      ++count;
      if (!(pa == pb)) {
        ok = false;
        if (report)
          *report += "  hbar^" + std::to_string(n) + " xi^" +
                     std::to_string(m) + ": " + pa.str() + " vs " + pb.str() +
                     "\n";
      }
    }
    if (a.logxi(n) != b.logxi(n)) {
      ok = false;
      if (report)
        *report += "  hbar^" + std::to_string(n) + " log slot: " +
                   rat_str(a.logxi(n)) + " vs " + rat_str(b.logxi(n)) + "\n";
    }
  }
  if (cells) *cells = count;
  return ok;
}

}  // namespace hexp
