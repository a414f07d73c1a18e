#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <vector>

#include "sicg/numeric.hpp"

namespace sicg {

using Rational = boost::multiprecision::mpq_rational;

long euler_phi(long m);
// Integer coefficients of the m-th cyclotomic polynomial, constant term first.
const std::vector<long>& cyclotomic_polynomial(long m);

// Element of Q(zeta_m) in the power basis 1, zeta, ..., zeta^(phi(m)-1).
class CyclotomicElement {
 public:
  explicit CyclotomicElement(long m);
  static CyclotomicElement rational(long m, const Rational& q);
  static CyclotomicElement zeta_power(long m, long j);

  long conductor() const { return m_; }
  const std::vector<Rational>& coefficients() const { return c_; }
  bool is_zero() const;

  CyclotomicElement& operator+=(const CyclotomicElement& o);
  CyclotomicElement& operator-=(const CyclotomicElement& o);
  CyclotomicElement operator*(const CyclotomicElement& o) const;
  CyclotomicElement pow(long e) const;  // e >= 0

  bool operator==(const CyclotomicElement& o) const { return m_ == o.m_ && c_ == o.c_; }

  // Reduces a polynomial in zeta (index = exponent) modulo Phi_m.
  static CyclotomicElement from_polynomial(long m, std::vector<Rational> poly);

 private:
  long m_;
  std::vector<Rational> c_;
};

inline CyclotomicElement operator+(CyclotomicElement a, const CyclotomicElement& b) { return a += b; }
inline CyclotomicElement operator-(CyclotomicElement a, const CyclotomicElement& b) { return a -= b; }

// Conductor used for dimension d: 2*dbar.
long tau_conductor(long d);
// tau = -e^{i pi / d} as zeta_m^(m/2 + m/(2d)).
CyclotomicElement tau(long d);
CyclotomicElement tau_power(long d, long j);
// zeta -> zeta^k; NotCoprime unless gcd(k, m) = 1.
CyclotomicElement galois_apply(long k, const CyclotomicElement& x);
// Lifts a unit k mod dbar to a unit mod m = 2*dbar with the same residue mod dbar.
long lift_unit(long k, long dbar, long m);

Complex embed(const CyclotomicElement& x);

}  // namespace sicg
