#include "sicg/weyl_heisenberg.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace sicg {

RootTable::RootTable(long d) : d_(d), table_(static_cast<size_t>(2 * d)) {
  // tau = -e^{i pi/d} = e^{i pi (d+1)/d}
  for (long j = 0; j < 2 * d; ++j) table_[static_cast<size_t>(j)] = exp_i_pi(mod(j * (d + 1), 2 * d), d);
}

const RootTable& roots(long d) {
  static std::map<std::pair<long, long>, std::unique_ptr<RootTable>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, static_cast<long>(Real::default_precision()));
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<RootTable>(d)).first;
  return *it->second;
}

long symplectic_form(const DisplacementIndex& p, const DisplacementIndex& q, long modulus) {
  return mod(p[1] * q[0] - p[0] * q[1], modulus);
}

long displacement_exponent(const DisplacementIndex& p, long s, long d) {
  return mod(p[0] * p[1] + 2 * s * p[1], 2 * d);
}

CMatrix displacement(const DisplacementIndex& p, long d) {
  const RootTable& t = roots(d);
  CMatrix m(static_cast<int>(d), static_cast<int>(d));
  for (long s = 0; s < d; ++s) m(static_cast<int>(mod(s + p[0], d)), static_cast<int>(s)) = t.tau_pow(displacement_exponent(p, s, d));
  return m;
}

Complex trace_with_displacement(const CMatrix& a, const DisplacementIndex& p) {
  const long d = a.rows();
  const RootTable& t = roots(d);
  // Tr(A D_p) = sum_s A_{s, s+p1} tau^{p1 p2 + 2 s p2}
  Complex sum;
  for (long s = 0; s < d; ++s) sum += a(static_cast<int>(s), static_cast<int>(mod(s + p[0], d))) * t.tau_pow(displacement_exponent(p, s, d));
  return sum;
}

std::vector<Complex> expand(const CMatrix& a) {
  const long d = a.rows();
  const RootTable& t = roots(d);
  std::vector<Complex> out(static_cast<size_t>(d * d));
  const Real inv_d = Real(1) / d;
  for (long p1 = 0; p1 < d; ++p1)
    for (long p2 = 0; p2 < d; ++p2) {
      // Tr(A D_p^dagger) = sum_s A_{s+p1, s} conj(tau^{p1 p2 + 2 s p2})
      Complex sum;
      for (long s = 0; s < d; ++s)
        sum += a(static_cast<int>(mod(s + p1, d)), static_cast<int>(s)) * conj(t.tau_pow(displacement_exponent({p1, p2}, s, d)));
      out[static_cast<size_t>(p1 * d + p2)] = sum * inv_d;
    }
  return out;
}

CMatrix reconstruct(const std::vector<Complex>& coefficients, long d) {
  const RootTable& t = roots(d);
  CMatrix m(static_cast<int>(d), static_cast<int>(d));
  for (long p1 = 0; p1 < d; ++p1)
    for (long p2 = 0; p2 < d; ++p2) {
      const Complex& c = coefficients[static_cast<size_t>(p1 * d + p2)];
      if (c.re == 0 && c.im == 0) continue;
      for (long s = 0; s < d; ++s)
        m(static_cast<int>(mod(s + p1, d)), static_cast<int>(s)) += c * t.tau_pow(displacement_exponent({p1, p2}, s, d));
    }
  return m;
}

}  // namespace sicg
