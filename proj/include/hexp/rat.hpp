#pragma once
// Exact rational scalars.  Rat is GMP's mpq_class; this header adds the
// small combinatorial helpers the expansion engine needs (powers,
// factorials, generalized binomials, Bernoulli-derived K coefficients)
// and the canonical "p/q" text form used by renderers and JSON.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "hexp/error.hpp"

namespace hexp {

using Rat = mpq_class;

inline Rat rat_of(long num, long den = 1) {
  require(den != 0, ErrorKind::Config, "rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Canonical text form: "p" when the denominator is 1, else "p/q".
inline std::string rat_str(const Rat& r) {
  return r.get_str();
}

inline Rat rat_parse(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0)
    fail(ErrorKind::Config, "bad rational literal '" + s + "'");
  r.canonicalize();
  return r;
}

inline bool rat_is_integer(const Rat& r) {
  return r.get_den() == 1;
}

// Integer value of an integral rational; errors on a genuine fraction.
inline long rat_to_long(const Rat& r) {
  require(rat_is_integer(r), ErrorKind::Internal,
          "expected integer rational, got " + rat_str(r));
  require(r.get_num().fits_slong_p(), ErrorKind::Internal,
          "rational exponent too large: " + rat_str(r));
  return r.get_num().get_si();
}

inline Rat rat_pow(const Rat& base, long e) {
  if (e == 0) return Rat(1);
  require(base != 0 || e > 0, ErrorKind::Internal, "0 raised to negative power");
  Rat b = e < 0 ? Rat(1) / base : base;
  long n = e < 0 ? -e : e;
  Rat acc(1);
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

inline Rat rat_factorial(long n) {
  require(n >= 0, ErrorKind::Internal, "factorial of negative argument");
  Rat acc(1);
  for (long k = 2; k <= n; ++k) acc *= Rat(k);
  return acc;
}

// Generalized binomial coefficient C(q, k) = q (q-1) ... (q-k+1) / k!
// for rational q and non-negative integer k.
inline Rat rat_binom(const Rat& q, long k) {
  require(k >= 0, ErrorKind::Internal, "binomial with negative lower index");
  Rat acc(1);
  for (long j = 0; j < k; ++j) acc *= (q - Rat(j)) / Rat(j + 1);
  return acc;
}

// Coefficients K_{2p} of the expansion z / (e^z - 1) = 1 - z/2 + sum_{p>=1}
// K_{2p} z^{2p}.  Equivalently K_{2p} = B_{2p} / (2p)! with B the Bernoulli
// numbers; computed here directly from the defining series inversion.
// k_coeffs(pmax)[p] holds K_{2p}, index 0 unused (set to 1 for z^0).
inline std::vector<Rat> k_coeffs(long pmax) {
  // b[n] = B_n / n! from the recurrence sum_{j=0}^{n} b[j] / (n-j+1)! = [n==0].
  long nmax = 2 * pmax;
  std::vector<Rat> b(nmax + 1);
  b[0] = 1;
  for (long n = 1; n <= nmax; ++n) {
    Rat acc(0);
    for (long j = 0; j < n; ++j) acc += b[j] / rat_factorial(n - j + 1);
    b[n] = -acc;
  }
  std::vector<Rat> out(pmax + 1);
  out[0] = 1;
  for (long p = 1; p <= pmax; ++p) out[p] = b[2 * p];
  return out;
}

}  // namespace hexp
