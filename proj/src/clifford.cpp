#include "sicg/clifford.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sicg {

std::string CliffordElement::str() const {
  std::ostringstream os;
  os << "p=(" << p[0] << "," << p[1] << ") F=" << f.str();
  return os.str();
}

namespace {

CMatrix prime_unitary(const ResidueMatrix& f, long d) {
  const long n = f.modulus();
  const RootTable& t = roots(d);
  const long binv = inverse_mod(f.beta(), n);
  const long al = f.alpha(), de = f.delta();
  const Real scale = Real(1) / boost::multiprecision::sqrt(Real(d));
  CMatrix u(static_cast<int>(d), static_cast<int>(d));
  for (long r = 0; r < d; ++r)
    for (long s = 0; s < d; ++s) {
      long e = mod(binv * mod(de * r * r - 2 * r * s + al * s * s, 2 * d), 2 * d);
      u(static_cast<int>(r), static_cast<int>(s)) = t.tau_pow(e) * scale;
    }
  return u;
}

}  // namespace

CMatrix symplectic_unitary(const ResidueMatrix& f, long d) {
  const long n = dbar_of(d);
  if (f.modulus() != n) throw std::invalid_argument("symplectic_unitary: F must be taken mod dbar");
  if (f.det() != mod(1, n)) throw std::invalid_argument("symplectic_unitary: F must be symplectic");
  if (is_prime_matrix(f, n)) return prime_unitary(f, d);
  auto [f1, f2] = prime_decompose(f, n);
  return prime_unitary(f1, d) * prime_unitary(f2, d);
}

ExtendedOperator extended_unitary(const CliffordElement& e, long d) {
  ExtendedOperator out;
  ResidueMatrix f = e.f;
  if (e.antiunitary()) {
    f = f * j_matrix(f.modulus());
    out.conjugate = true;
  }
  out.matrix = displacement(e.p, d) * symplectic_unitary(f, d);
  return out;
}

CMatrix conjugate_by(const ExtendedOperator& u, const CMatrix& x) {
  const CMatrix& y = u.conjugate ? x.conjugate() : x;
  return u.matrix * y * u.matrix.adjoint();
}

ExtendedOperator compose(const ExtendedOperator& u, const ExtendedOperator& v) {
  ExtendedOperator out;
  out.matrix = u.matrix * (u.conjugate ? v.matrix.conjugate() : v.matrix);
  out.conjugate = u.conjugate != v.conjugate;
  return out;
}

bool equal_up_to_phase(const CMatrix& a, const CMatrix& b, const Real& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  int bi = 0, bj = 0;
  Real best = -1;
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      Real v = norm(b(i, j));
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  if (best <= 0) return max_abs(a) < tol;
  Complex ratio = a(bi, bj) / b(bi, bj);
  if (boost::multiprecision::abs(abs(ratio) - 1) > tol) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (abs(a(i, j) - ratio * b(i, j)) > tol) return false;
  return true;
}

std::vector<CliffordElement> kernel_elements(long d) {
  const long n = dbar_of(d);
  const Real tol = structural_tolerance();
  std::vector<CliffordElement> out;
  for (const ResidueMatrix& f : esl2(n)) {
    if (f.det() != mod(1, n)) continue;
    CMatrix u = symplectic_unitary(f, d);
    // D_p U_F is scalar only if U_F is monomial; its permutation fixes p1.
    std::vector<long> row_of(static_cast<size_t>(d), -1);
    bool monomial = true;
    for (long s = 0; s < d && monomial; ++s)
      for (long r = 0; r < d; ++r)
        if (abs(u(static_cast<int>(r), static_cast<int>(s))) > tol) {
          if (row_of[static_cast<size_t>(s)] >= 0) {
            monomial = false;
            break;
          }
          row_of[static_cast<size_t>(s)] = r;
        }
    if (!monomial) continue;
    long p1 = mod(-row_of[0], d);
    bool shift = true;
    for (long s = 0; s < d; ++s)
      if (row_of[static_cast<size_t>(s)] != mod(s - p1, d)) shift = false;
    if (!shift) continue;
    for (long p2 = 0; p2 < d; ++p2) {
      CMatrix m = displacement({p1, p2}, d) * u;
      if (equal_up_to_phase(m, CMatrix::identity(static_cast<int>(d)), tol)) out.push_back({{p1, p2}, f});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CliffordElement> kernel_characterization(long d) {
  const long n = dbar_of(d);
  std::vector<CliffordElement> out;
  if (d % 2 == 1) {
    out.push_back({{0, 0}, ResidueMatrix::identity(n)});
    return out;
  }
  for (long r = 0; r < 2; ++r)
    for (long s = 0; s < 2; ++s)
      for (long t = 0; t < 2; ++t)
        out.push_back({{mod(s * d / 2, d), mod(t * d / 2, d)}, ResidueMatrix(n, 1 + r * d, s * d, t * d, 1 + r * d)});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sicg
