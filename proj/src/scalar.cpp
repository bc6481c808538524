#include "hexp/scalar.hpp"

#include <algorithm>
#include <sstream>

namespace hexp {

namespace {

int vec_degree(const std::vector<int>& v) {
  int d = 0;
  for (int e : v) d += e;
  return d;
}

// Lexicographic compare with implicit zero extension.
int vec_cmp(const std::vector<int>& a, const std::vector<int>& b) {
  size_t n = std::max(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int ai = i < a.size() ? a[i] : 0;
    int bi = i < b.size() ? b[i] : 0;
    if (ai != bi) return ai < bi ? -1 : 1;
  }
  return 0;
}

std::vector<int> vec_add(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

void render_times(std::ostringstream& os, const char* name,
                  const std::vector<int>& exps) {
  for (size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] == 0) continue;
    os << "*" << name << (i + 1);
    if (exps[i] != 1) os << "^" << exps[i];
  }
}

void render_upow(std::ostringstream& os, const char* name, const Rat& q) {
  if (q == 0) return;
  os << "*" << name;
  if (q != 1) {
    if (rat_is_integer(q) && q > 0)
      os << "^" << rat_str(q);
    else
      os << "^(" << rat_str(q) << ")";
  }
}

void render_lpow(std::ostringstream& os, const char* name, int j) {
  if (j == 0) return;
  os << "*" << name;
  if (j != 1) os << "^" << j;
}

}  // namespace

int Monomial::t_degree() const { return vec_degree(t); }
int Monomial::tbar_degree() const { return vec_degree(tbar); }

bool Monomial::is_unit() const {
  return t.empty() && tbar.empty() && u == 0 && l == 0;
}

void Monomial::trim() {
  while (!t.empty() && t.back() == 0) t.pop_back();
  while (!tbar.empty() && tbar.back() == 0) tbar.pop_back();
}

bool operator==(const Monomial& a, const Monomial& b) {
  return vec_cmp(a.t, b.t) == 0 && vec_cmp(a.tbar, b.tbar) == 0 &&
         a.u == b.u && a.l == b.l;
}

bool operator<(const Monomial& a, const Monomial& b) {
  if (int c = vec_cmp(a.t, b.t); c != 0) return c < 0;
  if (int c = vec_cmp(a.tbar, b.tbar); c != 0) return c < 0;
  if (int c = cmp(a.u, b.u); c != 0) return c < 0;
  return a.l < b.l;
}

void require_same_cfg(const RingConfig& a, const RingConfig& b,
                      const char* where) {
  require(a == b, ErrorKind::Config,
          std::string("ring config mismatch in ") + where);
}

ScalarPoly ScalarPoly::constant(const RingConfig& cfg, const Rat& c) {
  ScalarPoly p(cfg);
  p.add_term(Monomial{}, c);
  return p;
}

ScalarPoly ScalarPoly::u_pow(const RingConfig& cfg, const Rat& q) {
  ScalarPoly p(cfg);
  Monomial m;
  m.u = q;
  p.add_term(m, 1);
  return p;
}

ScalarPoly ScalarPoly::l_pow(const RingConfig& cfg, int j) {
  require(j >= 0, ErrorKind::Internal, "negative log power");
  ScalarPoly p(cfg);
  Monomial m;
  m.l = j;
  p.add_term(m, 1);
  return p;
}

ScalarPoly ScalarPoly::s_var(const RingConfig& cfg) {
  return one(cfg) - u_pow(cfg, 1);
}

ScalarPoly ScalarPoly::t_var(const RingConfig& cfg, int j) {
  require(j >= 1, ErrorKind::Config, "times are 1-based");
  require(j <= cfg.t_vars, ErrorKind::Config,
          "t" + std::to_string(j) + " exceeds configured " +
              std::to_string(cfg.t_vars) + " time variables");
  ScalarPoly p(cfg);
  Monomial m;
  m.t.assign(j, 0);
  m.t[j - 1] = 1;
  p.add_term(m, 1);
  return p;
}

ScalarPoly ScalarPoly::tbar_var(const RingConfig& cfg, int j) {
  require(j >= 1, ErrorKind::Config, "times are 1-based");
  require(j <= cfg.tbar_vars, ErrorKind::Config,
          "tbar" + std::to_string(j) + " exceeds configured " +
              std::to_string(cfg.tbar_vars) + " time variables");
  ScalarPoly p(cfg);
  Monomial m;
  m.tbar.assign(j, 0);
  m.tbar[j - 1] = 1;
  p.add_term(m, 1);
  return p;
}

bool ScalarPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
}

Rat ScalarPoly::constant_value() const {
  require(is_constant(), ErrorKind::Internal,
          "constant_value on non-constant poly " + str());
  return terms_.empty() ? Rat(0) : terms_.begin()->second;
}

Rat ScalarPoly::coeff(const Monomial& m) const {
  Monomial key = m;
  key.trim();
  auto it = terms_.find(key);
  return it == terms_.end() ? Rat(0) : it->second;
}

void ScalarPoly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  if (m.t_degree() > cfg_.t_deg || m.tbar_degree() > cfg_.tbar_deg) return;
  Monomial key = m;
  key.trim();
  require((int)key.t.size() <= cfg_.t_vars &&
              (int)key.tbar.size() <= cfg_.tbar_vars,
          ErrorKind::Internal, "monomial uses unconfigured time variable");
  auto [it, inserted] = terms_.emplace(std::move(key), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

ScalarPoly ScalarPoly::operator-() const {
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

ScalarPoly& ScalarPoly::operator+=(const ScalarPoly& rhs) {
  require_same_cfg(cfg_, rhs.cfg_, "ScalarPoly::operator+=");
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

ScalarPoly& ScalarPoly::operator-=(const ScalarPoly& rhs) {
  require_same_cfg(cfg_, rhs.cfg_, "ScalarPoly::operator-=");
  for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
  return *this;
}

ScalarPoly& ScalarPoly::operator*=(const ScalarPoly& rhs) {
  require_same_cfg(cfg_, rhs.cfg_, "ScalarPoly::operator*=");
  ScalarPoly out(cfg_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) {
      Monomial m;
      m.t = vec_add(ma.t, mb.t);
      m.tbar = vec_add(ma.tbar, mb.tbar);
      m.u = ma.u + mb.u;
      m.l = ma.l + mb.l;
      out.add_term(m, ca * cb);
    }
  }
  *this = std::move(out);
  return *this;
}

ScalarPoly& ScalarPoly::operator*=(const Rat& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

bool ScalarPoly::operator==(const ScalarPoly& rhs) const {
  require_same_cfg(cfg_, rhs.cfg_, "ScalarPoly::operator==");
  return terms_ == rhs.terms_;
}

ScalarPoly ScalarPoly::d_s() const {
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_) {
    if (m.u != 0) {
      Monomial dm = m;
      dm.u -= 1;
      out.add_term(dm, -c * m.u);
    }
    if (m.l > 0) {
      Monomial dm = m;
      dm.u -= 1;
      dm.l -= 1;
      out.add_term(dm, -c * Rat(m.l));
    }
  }
  return out;
}

ScalarPoly ScalarPoly::d_s_pow(int n) const {
  require(n >= 0, ErrorKind::Internal, "negative derivative order");
  ScalarPoly out = *this;
  for (int i = 0; i < n; ++i) out = out.d_s();
  return out;
}

ScalarPoly ScalarPoly::d_t(int j) const {
  require(j >= 1 && j <= cfg_.t_vars, ErrorKind::Config,
          "d_t index out of range");
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_) {
    if ((int)m.t.size() < j || m.t[j - 1] == 0) continue;
    Monomial dm = m;
    int e = dm.t[j - 1];
    dm.t[j - 1] = e - 1;
    out.add_term(dm, c * Rat(e));
  }
  return out;
}

ScalarPoly ScalarPoly::d_tbar(int j) const {
  require(j >= 1 && j <= cfg_.tbar_vars, ErrorKind::Config,
          "d_tbar index out of range");
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_) {
    if ((int)m.tbar.size() < j || m.tbar[j - 1] == 0) continue;
    Monomial dm = m;
    int e = dm.tbar[j - 1];
    dm.tbar[j - 1] = e - 1;
    out.add_term(dm, c * Rat(e));
  }
  return out;
}

namespace {

// I(q, j) = integral of u^q l^j du as a poly in (u, l); recursion in j.
void antideriv_u_term(const Rat& q, int j, const Rat& c, ScalarPoly& out) {
  if (c == 0) return;
  if (q == -1) {
    Monomial m;
    m.l = j + 1;
    out.add_term(m, c / Rat(j + 1));
    return;
  }
  Monomial m;
  m.u = q + 1;
  m.l = j;
  out.add_term(m, c / (q + 1));
  if (j > 0) antideriv_u_term(q, j - 1, -c * Rat(j) / (q + 1), out);
}

}  // namespace

ScalarPoly ScalarPoly::antideriv_s() const {
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_) {
    if (m.u == 0 && m.l == 0) {
      // Pure time monomials integrate against ds = -du to c * (1 - u):
      // the constant choice that keeps text output stable.
      Monomial m1 = m;
      out.add_term(m1, c);
      Monomial mu = m;
      mu.u = 1;
      out.add_term(mu, -c);
      continue;
    }
    ScalarPoly integral(cfg_);
    antideriv_u_term(m.u, m.l, -c, integral);  // ds = -du
    for (const auto& [mi, ci] : integral.terms()) {
      Monomial full = mi;
      full.t = m.t;
      full.tbar = m.tbar;
      out.add_term(full, ci);
    }
  }
  return out;
}

int ScalarPoly::max_t_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.t_degree());
  return d;
}

int ScalarPoly::max_tbar_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.tbar_degree());
  return d;
}

ScalarPoly ScalarPoly::truncate_degree(int dt, int dtb) const {
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_)
    if (m.t_degree() <= dt && m.tbar_degree() <= dtb) out.add_term(m, c);
  return out;
}

ScalarPoly ScalarPoly::without_vars(const std::vector<std::string>& vars) const {
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_) {
    bool keep = true;
    for (const auto& v : vars) {
      if (v == "s") {
        if (m.u != 0 || m.l != 0) keep = false;
      } else if (v.rfind("tbar", 0) == 0) {
        int j = std::stoi(v.substr(4));
        if ((int)m.tbar.size() >= j && m.tbar[j - 1] != 0) keep = false;
      } else if (v.rfind("t", 0) == 0) {
        int j = std::stoi(v.substr(1));
        if ((int)m.t.size() >= j && m.t[j - 1] != 0) keep = false;
      } else {
        fail(ErrorKind::Internal, "unknown variable name " + v);
      }
      if (!keep) break;
    }
    if (keep) out.add_term(m, c);
  }
  return out;
}

ScalarPoly ScalarPoly::antideriv_t(int j) const {
  require(j >= 1 && j <= cfg_.t_vars, ErrorKind::Config,
          "antideriv_t index out of range");
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_) {
    Monomial im = m;
    if ((int)im.t.size() < j) im.t.resize(j, 0);
    int e = im.t[j - 1];
    require(m.t_degree() + 1 <= cfg_.t_deg, ErrorKind::Internal,
            "antideriv_t would exceed the degree cap");
    im.t[j - 1] = e + 1;
    out.add_term(im, c / Rat(e + 1));
  }
  return out;
}

ScalarPoly ScalarPoly::antideriv_tbar(int j) const {
  require(j >= 1 && j <= cfg_.tbar_vars, ErrorKind::Config,
          "antideriv_tbar index out of range");
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_) {
    Monomial im = m;
    if ((int)im.tbar.size() < j) im.tbar.resize(j, 0);
    int e = im.tbar[j - 1];
    require(m.tbar_degree() + 1 <= cfg_.tbar_deg, ErrorKind::Internal,
            "antideriv_tbar would exceed the degree cap");
    im.tbar[j - 1] = e + 1;
    out.add_term(im, c / Rat(e + 1));
  }
  return out;
}

std::string ScalarPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rat a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    std::ostringstream body;
    render_times(body, "t", m.t);
    render_times(body, "tbar", m.tbar);
    render_upow(body, "u", m.u);
    render_lpow(body, "l", m.l);
    std::string tail = body.str();
    if (tail.empty()) {
      os << rat_str(a);
    } else if (a == 1) {
      os << tail.substr(1);
    } else {
      os << rat_str(a) << tail;
    }
  }
  return os.str();
}

ScalarPoly exp_scalar(const ScalarPoly& p) {
  const RingConfig& cfg = p.cfg();
  Monomial lmon;
  lmon.l = 1;
  Rat q = p.coeff(lmon);

  ScalarPoly nil(cfg);
  for (const auto& [m, c] : p.terms()) {
    if (m == lmon) continue;
    if (m.t_degree() == 0 && m.tbar_degree() == 0) {
      ScalarPoly bad(cfg);
      bad.add_term(m, c);
      fail(ErrorKind::Check,
           "exp_scalar argument is not q*l + nilpotent: offending term " +
               bad.str());
    }
    nil.add_term(m, c);
  }

  ScalarPoly acc = ScalarPoly::one(cfg);
  ScalarPoly power = ScalarPoly::one(cfg);
  int cap = cfg.t_deg + cfg.tbar_deg + 1;
  for (int k = 1; k <= cap; ++k) {
    power *= nil;
    if (power.is_zero()) break;
    acc += power * (Rat(1) / rat_factorial(k));
  }
  return ScalarPoly::u_pow(cfg, q) * acc;
}

std::vector<ScalarPoly> exp_hgraded(const std::vector<ScalarPoly>& a) {
  require(!a.empty(), ErrorKind::Internal, "exp_hgraded on empty grading");
  const RingConfig& cfg = a[0].cfg();
  size_t n = a.size();
  // exp(a_0) times exp(hbar a_1 + ...); the latter is polynomial in hbar
  // truncated at order n-1.
  std::vector<ScalarPoly> out(n, ScalarPoly::zero(cfg));
  std::vector<ScalarPoly> acc(n, ScalarPoly::zero(cfg));
  acc[0] = ScalarPoly::one(cfg);
  std::vector<ScalarPoly> power = acc;
  for (size_t k = 1; k < n; ++k) {
    // power <- power * (hbar-positive part of a), truncated.
    std::vector<ScalarPoly> next(n, ScalarPoly::zero(cfg));
    for (size_t i = 0; i < n; ++i) {
      if (power[i].is_zero()) continue;
      for (size_t j = 1; i + j < n; ++j) next[i + j] += power[i] * a[j];
    }
    power = std::move(next);
    Rat w = Rat(1) / rat_factorial((long)k);
    for (size_t i = 0; i < n; ++i) acc[i] += power[i] * w;
  }
  ScalarPoly e0 = exp_scalar(a[0]);
  for (size_t i = 0; i < n; ++i) out[i] = e0 * acc[i];
  return out;
}

// ---------------------------------------------------------------------------
// DblScalar

int DblMonomial::t_degree() const { return vec_degree(t); }
int DblMonomial::tbar_degree() const { return vec_degree(tbar); }

bool operator==(const DblMonomial& a, const DblMonomial& b) {
  return vec_cmp(a.t, b.t) == 0 && vec_cmp(a.tbar, b.tbar) == 0 &&
         a.u == b.u && a.l == b.l && a.up == b.up && a.lp == b.lp;
}

bool operator<(const DblMonomial& a, const DblMonomial& b) {
  if (int c = vec_cmp(a.t, b.t); c != 0) return c < 0;
  if (int c = vec_cmp(a.tbar, b.tbar); c != 0) return c < 0;
  if (int c = cmp(a.u, b.u); c != 0) return c < 0;
  if (a.l != b.l) return a.l < b.l;
  if (int c = cmp(a.up, b.up); c != 0) return c < 0;
  return a.lp < b.lp;
}

DblScalar DblScalar::embed(const ScalarPoly& p, bool primed) {
  DblScalar out(p.cfg());
  for (const auto& [m, c] : p.terms()) {
    DblMonomial d;
    d.t = m.t;
    d.tbar = m.tbar;
    if (primed) {
      d.up = m.u;
      d.lp = m.l;
    } else {
      d.u = m.u;
      d.l = m.l;
    }
    out.add_term(d, c);
  }
  return out;
}

void DblScalar::add_term(const DblMonomial& m, const Rat& c) {
  if (c == 0) return;
  if (m.t_degree() > cfg_.t_deg || m.tbar_degree() > cfg_.tbar_deg) return;
  DblMonomial key = m;
  while (!key.t.empty() && key.t.back() == 0) key.t.pop_back();
  while (!key.tbar.empty() && key.tbar.back() == 0) key.tbar.pop_back();
  auto [it, inserted] = terms_.emplace(std::move(key), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

DblScalar& DblScalar::operator+=(const DblScalar& rhs) {
  require_same_cfg(cfg_, rhs.cfg_, "DblScalar::operator+=");
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

DblScalar& DblScalar::operator*=(const DblScalar& rhs) {
  require_same_cfg(cfg_, rhs.cfg_, "DblScalar::operator*=");
  DblScalar out(cfg_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) {
      DblMonomial m;
      m.t = vec_add(ma.t, mb.t);
      m.tbar = vec_add(ma.tbar, mb.tbar);
      m.u = ma.u + mb.u;
      m.l = ma.l + mb.l;
      m.up = ma.up + mb.up;
      m.lp = ma.lp + mb.lp;
      out.add_term(m, ca * cb);
    }
  }
  *this = std::move(out);
  return *this;
}

DblScalar& DblScalar::operator*=(const Rat& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

bool DblScalar::operator==(const DblScalar& rhs) const {
  require_same_cfg(cfg_, rhs.cfg_, "DblScalar::operator==");
  return terms_ == rhs.terms_;
}

DblScalar DblScalar::d_sp() const {
  DblScalar out(cfg_);
  for (const auto& [m, c] : terms_) {
    if (m.up != 0) {
      DblMonomial dm = m;
      dm.up -= 1;
      out.add_term(dm, -c * m.up);
    }
    if (m.lp > 0) {
      DblMonomial dm = m;
      dm.up -= 1;
      dm.lp -= 1;
      out.add_term(dm, -c * Rat(m.lp));
    }
  }
  return out;
}

ScalarPoly DblScalar::eval_diagonal() const {
  ScalarPoly out(cfg_);
  for (const auto& [m, c] : terms_) {
    Monomial dm;
    dm.t = m.t;
    dm.tbar = m.tbar;
    dm.u = m.u + m.up;
    dm.l = m.l + m.lp;
    out.add_term(dm, c);
  }
  return out;
}

bool DblScalar::has_primed_part() const {
  for (const auto& [m, c] : terms_)
    if (m.up != 0 || m.lp != 0) return true;
  return false;
}

std::string DblScalar::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rat a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    std::ostringstream body;
    render_times(body, "t", m.t);
    render_times(body, "tbar", m.tbar);
    render_upow(body, "u", m.u);
    render_lpow(body, "l", m.l);
    render_upow(body, "u'", m.up);
    render_lpow(body, "l'", m.lp);
    std::string tail = body.str();
    if (tail.empty()) {
      os << rat_str(a);
    } else if (a == 1) {
      os << tail.substr(1);
    } else {
      os << rat_str(a) << tail;
    }
  }
  return os.str();
}

}  // namespace hexp
