#include "sicg/cyclotomic.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include "sicg/errors.hpp"
#include "sicg/residue.hpp"

namespace sicg {

long euler_phi(long m) {
  long out = m;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    while (m % p == 0) m /= p;
    out -= out / p;
  }
  if (m > 1) out -= out / m;
  return out;
}

namespace {

// Exact division of integer polynomials (divisor monic).
std::vector<long> divide_exact(std::vector<long> num, const std::vector<long>& den) {
  const size_t dn = den.size() - 1;
  std::vector<long> q(num.size() - dn, 0);
  for (size_t i = num.size(); i-- > dn;) {
    long c = num[i];
    q[i - dn] = c;
    for (size_t j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
  }
  for (size_t i = 0; i < dn; ++i)
    if (num[i] != 0) throw std::logic_error("cyclotomic division left a remainder");
  return q;
}

}  // namespace

const std::vector<long>& cyclotomic_polynomial(long m) {
  static std::map<long, std::vector<long>> cache;
  static std::recursive_mutex mu;
  std::lock_guard<std::recursive_mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  // Phi_m = (x^m - 1) / prod_{e | m, e < m} Phi_e
  std::vector<long> num(m + 1, 0);
  num[0] = -1;
  num[m] = 1;
  for (long e = 1; e < m; ++e) {
    if (m % e != 0) continue;
    num = divide_exact(num, cyclotomic_polynomial(e));
  }
  return cache.emplace(m, num).first->second;
}

CyclotomicElement::CyclotomicElement(long m) : m_(m), c_(static_cast<size_t>(euler_phi(m))) {}

CyclotomicElement CyclotomicElement::rational(long m, const Rational& q) {
  CyclotomicElement x(m);
  x.c_[0] = q;
  return x;
}

CyclotomicElement CyclotomicElement::zeta_power(long m, long j) {
  std::vector<Rational> poly(static_cast<size_t>(m));
  poly[static_cast<size_t>(mod(j, m))] = 1;
  return from_polynomial(m, std::move(poly));
}

CyclotomicElement CyclotomicElement::from_polynomial(long m, std::vector<Rational> poly) {
  const auto& phi = cyclotomic_polynomial(m);
  const size_t deg = phi.size() - 1;
  for (size_t i = poly.size(); i-- > deg;) {
    if (poly[i] == 0) continue;
    Rational c = poly[i];
    for (size_t j = 0; j <= deg; ++j) poly[i - deg + j] -= c * phi[j];
  }
  CyclotomicElement x(m);
  for (size_t i = 0; i < deg && i < poly.size(); ++i) x.c_[i] = poly[i];
  return x;
}

bool CyclotomicElement::is_zero() const {
  for (const auto& q : c_)
    if (q != 0) return false;
  return true;
}

CyclotomicElement& CyclotomicElement::operator+=(const CyclotomicElement& o) {
  if (o.m_ != m_) throw std::invalid_argument("conductor mismatch");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

CyclotomicElement& CyclotomicElement::operator-=(const CyclotomicElement& o) {
  if (o.m_ != m_) throw std::invalid_argument("conductor mismatch");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

CyclotomicElement CyclotomicElement::operator*(const CyclotomicElement& o) const {
  if (o.m_ != m_) throw std::invalid_argument("conductor mismatch");
  std::vector<Rational> prod(2 * c_.size());
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (size_t j = 0; j < o.c_.size(); ++j)
      if (o.c_[j] != 0) prod[i + j] += c_[i] * o.c_[j];
  }
  return from_polynomial(m_, std::move(prod));
}

CyclotomicElement CyclotomicElement::pow(long e) const {
  if (e < 0) throw std::invalid_argument("negative power");
  CyclotomicElement out = rational(m_, 1);
  CyclotomicElement base = *this;
  while (e > 0) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

long tau_conductor(long d) { return 2 * dbar_of(d); }

CyclotomicElement tau(long d) { return tau_power(d, 1); }

CyclotomicElement tau_power(long d, long j) {
  long m = tau_conductor(d);
  long step = m / 2 + m / (2 * d);
  return CyclotomicElement::zeta_power(m, mod(step * mod(j, m), m));
}

CyclotomicElement galois_apply(long k, const CyclotomicElement& x) {
  const long m = x.conductor();
  if (gcd(k, m) != 1) throw NotCoprime("k = " + std::to_string(k) + " mod " + std::to_string(m));
  std::vector<Rational> poly(static_cast<size_t>(m));
  const auto& c = x.coefficients();
  for (size_t j = 0; j < c.size(); ++j)
    if (c[j] != 0) poly[static_cast<size_t>(mod(static_cast<long>(j) * k, m))] += c[j];
  return CyclotomicElement::from_polynomial(m, std::move(poly));
}

long lift_unit(long k, long dbar, long m) {
  k = mod(k, dbar);
  for (long t = k; t < m; t += dbar)
    if (gcd(t, m) == 1) return t;
  throw NotCoprime("no unit lift of " + std::to_string(k));
}

Complex embed(const CyclotomicElement& x) {
  const long m = x.conductor();
  Complex s;
  const auto& c = x.coefficients();
  for (size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0) continue;
    Real q = Real(boost::multiprecision::numerator(c[j]).str()) / Real(boost::multiprecision::denominator(c[j]).str());
    s += exp_i_pi(2 * static_cast<long>(j), m) * q;
  }
  return s;
}

}  // namespace sicg
