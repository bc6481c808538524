#pragma once
// Coefficient ring for the expansion: exact polynomials in finitely many
// times t_1..t_T, tbar_1..tbar_Tb with rational coefficients, tensored
// with rational powers of u = 1 - s and natural powers of l = log(1 - s).
// Time degrees are capped (working modulo the ideal of higher degree),
// u and l exponents are unrestricted.  Provides the s/t derivations, the
// canonical s-antiderivative, and exponentials of q*l + nilpotent parts.

#include <map>
#include <string>
#include <vector>

#include "hexp/rat.hpp"

namespace hexp {

// Ring shape: number of active time variables per family and the degree
// caps.  Every ScalarPoly carries one; mixing shapes is a Config error.
struct RingConfig {
  int t_vars = 0;
  int tbar_vars = 0;
  int t_deg = 0;
  int tbar_deg = 0;

  bool operator==(const RingConfig&) const = default;
};

// One monomial t^a tbar^b u^q l^j.  Time exponent vectors are stored with
// trailing zeros trimmed; comparisons zero-extend.
struct Monomial {
  std::vector<int> t;
  std::vector<int> tbar;
  Rat u = 0;
  int l = 0;

  int t_degree() const;
  int tbar_degree() const;
  bool is_unit() const;  // the monomial 1

  void trim();
};

bool operator==(const Monomial& a, const Monomial& b);
// Canonical order: t exponents lexicographically, then tbar, then u
// ascending, then l ascending.  Term rendering follows map order.
bool operator<(const Monomial& a, const Monomial& b);

class ScalarPoly {
 public:
  ScalarPoly() = default;
  explicit ScalarPoly(const RingConfig& cfg) : cfg_(cfg) {}

  static ScalarPoly zero(const RingConfig& cfg) { return ScalarPoly(cfg); }
  static ScalarPoly constant(const RingConfig& cfg, const Rat& c);
  static ScalarPoly one(const RingConfig& cfg) { return constant(cfg, 1); }
  // u^q l^j as a standalone poly.
  static ScalarPoly u_pow(const RingConfig& cfg, const Rat& q);
  static ScalarPoly l_pow(const RingConfig& cfg, int j);
  // s itself, i.e. 1 - u.
  static ScalarPoly s_var(const RingConfig& cfg);
  // t_j / tbar_j, 1-based; j must be within the configured variable count.
  static ScalarPoly t_var(const RingConfig& cfg, int j);
  static ScalarPoly tbar_var(const RingConfig& cfg, int j);

  const RingConfig& cfg() const { return cfg_; }
  const std::map<Monomial, Rat>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  // True when the poly is a single rational constant (or zero).
  bool is_constant() const;
  Rat constant_value() const;

  // Coefficient of an exact monomial (zero if absent).
  Rat coeff(const Monomial& m) const;
  // Adds c * m, respecting the degree caps (over-cap terms vanish).
  void add_term(const Monomial& m, const Rat& c);

  ScalarPoly operator-() const;
  ScalarPoly& operator+=(const ScalarPoly& rhs);
  ScalarPoly& operator-=(const ScalarPoly& rhs);
  ScalarPoly& operator*=(const ScalarPoly& rhs);
  ScalarPoly& operator*=(const Rat& c);

  friend ScalarPoly operator+(ScalarPoly a, const ScalarPoly& b) { return a += b; }
  friend ScalarPoly operator-(ScalarPoly a, const ScalarPoly& b) { return a -= b; }
  friend ScalarPoly operator*(ScalarPoly a, const ScalarPoly& b) { return a *= b; }
  friend ScalarPoly operator*(ScalarPoly a, const Rat& c) { return a *= c; }
  friend ScalarPoly operator*(const Rat& c, ScalarPoly a) { return a *= c; }

  bool operator==(const ScalarPoly& rhs) const;

  // d/ds with u' = -1, l' = -1/u.
  ScalarPoly d_s() const;
  // Iterated d/ds.
  ScalarPoly d_s_pow(int n) const;
  // d/dt_j and d/dtbar_j, 1-based.
  ScalarPoly d_t(int j) const;
  ScalarPoly d_tbar(int j) const;

  // Exact s-antiderivative, termwise in u^q l^j.  Convention: monomials
  // free of u and l integrate to coeff * (1 - u); no other constant is
  // ever introduced.  d_s(antideriv_s(p)) == p always holds.
  ScalarPoly antideriv_s() const;

  // Largest total t / tbar degree present (zero for the zero poly).
  int max_t_degree() const;
  int max_tbar_degree() const;
  // Restriction to terms with t-degree <= dt and tbar-degree <= dtb.
  ScalarPoly truncate_degree(int dt, int dtb) const;
  // Restriction to terms whose listed variables all have exponent zero.
  // Variables are named "s", "t3", "tbar1".
  ScalarPoly without_vars(const std::vector<std::string>& vars) const;
  // Integrates in t_j (or tbar_j): t_j^k -> t_j^{k+1} / (k+1).  The top
  // degree cap is respected, so callers integrate only polys known to
  // stay below it.
  ScalarPoly antideriv_t(int j) const;
  ScalarPoly antideriv_tbar(int j) const;

  std::string str() const;

 private:
  RingConfig cfg_;
  std::map<Monomial, Rat> terms_;
};

void require_same_cfg(const RingConfig& a, const RingConfig& b,
                      const char* where);

// exp of a poly of the form q * l + n with n nilpotent (every monomial of
// n carries positive t or tbar degree): returns u^q * sum n^k / k!.
// A non-nilpotent remainder (constants, u powers, l^2, ...) is an error.
ScalarPoly exp_scalar(const ScalarPoly& p);

// exp of an hbar-graded scalar a_0 + hbar a_1 + ... truncated at the given
// order: exp_scalar(a_0) times the polynomial exponential of the
// hbar-positive part.  Slot i of the argument/result is the hbar^i part.
std::vector<ScalarPoly> exp_hgraded(const std::vector<ScalarPoly>& a);

// ---------------------------------------------------------------------------
// Doubled ring for the WKB workspace: two copies (s, l) and (s', l') of the
// logarithmic variables over the shared time polynomials.

struct DblMonomial {
  std::vector<int> t;
  std::vector<int> tbar;
  Rat u = 0;
  int l = 0;
  Rat up = 0;
  int lp = 0;

  int t_degree() const;
  int tbar_degree() const;
};

bool operator==(const DblMonomial& a, const DblMonomial& b);
bool operator<(const DblMonomial& a, const DblMonomial& b);

class DblScalar {
 public:
  DblScalar() = default;
  explicit DblScalar(const RingConfig& cfg) : cfg_(cfg) {}

  static DblScalar zero(const RingConfig& cfg) { return DblScalar(cfg); }
  // Embeds a single-variable poly on the unprimed (or primed) copy.
  static DblScalar embed(const ScalarPoly& p, bool primed);

  const RingConfig& cfg() const { return cfg_; }
  const std::map<DblMonomial, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const DblMonomial& m, const Rat& c);

  DblScalar& operator+=(const DblScalar& rhs);
  DblScalar& operator*=(const DblScalar& rhs);
  DblScalar& operator*=(const Rat& c);
  friend DblScalar operator+(DblScalar a, const DblScalar& b) { return a += b; }
  friend DblScalar operator*(DblScalar a, const DblScalar& b) { return a *= b; }
  friend DblScalar operator*(DblScalar a, const Rat& c) { return a *= c; }
  bool operator==(const DblScalar& rhs) const;

  // d/ds' acting on the primed copy only.
  DblScalar d_sp() const;
  // Diagonal evaluation s' = s, l' = l: exponents merge.
  ScalarPoly eval_diagonal() const;
  bool has_primed_part() const;

  std::string str() const;

 private:
  RingConfig cfg_;
  std::map<DblMonomial, Rat> terms_;
};

}  // namespace hexp
