#include "sicg/numeric.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sicg {

namespace {
thread_local unsigned g_digits = 40;  // mpfr default precision is per thread too
}

unsigned working_digits() { return g_digits; }

void set_working_digits(unsigned digits) {
  g_digits = digits;
  Real::default_precision(digits + kGuardDigits);
}

PrecisionScope::PrecisionScope(unsigned digits) : saved_(g_digits) { set_working_digits(digits); }
PrecisionScope::~PrecisionScope() { set_working_digits(saved_); }

Real ten_to_minus(int e) { return boost::multiprecision::pow(Real(10), -e); }

Real structural_tolerance() { return ten_to_minus(static_cast<int>(g_digits / 2)); }

Real pi_real() {
  Real x;
  mpfr_const_pi(x.backend().data(), MPFR_RNDN);
  return x;
}

Complex& Complex::operator/=(const Complex& o) {
  Real den = o.re * o.re + o.im * o.im;
  Real r = (re * o.re + im * o.im) / den;
  im = (im * o.re - re * o.im) / den;
  re = std::move(r);
  return *this;
}

Real abs(const Complex& z) { return boost::multiprecision::sqrt(norm(z)); }

Real arg(const Complex& z) { return boost::multiprecision::atan2(z.im, z.re); }

Complex polar(const Real& r, const Real& theta) {
  return Complex(r * boost::multiprecision::cos(theta), r * boost::multiprecision::sin(theta));
}

Complex sqrt(const Complex& z) {
  if (z.re == 0 && z.im == 0) return Complex();
  return polar(boost::multiprecision::sqrt(abs(z)), arg(z) / 2);
}

Complex cbrt(const Complex& z) {
  if (z.re == 0 && z.im == 0) return Complex();
  return polar(boost::multiprecision::cbrt(abs(z)), arg(z) / 3);
}

Complex exp_i(const Real& theta) {
  return Complex(boost::multiprecision::cos(theta), boost::multiprecision::sin(theta));
}

Complex exp_i_pi(long num, long den) {
  long m = 2 * den;
  num %= m;
  if (num < 0) num += m;
  // Exact values at the quarter turns keep products of roots of unity clean.
  if (num == 0) return Complex(1);
  if (2 * num == m) return Complex(-1);
  if (4 * num == m) return Complex(Real(0), Real(1));
  if (4 * num == 3 * m) return Complex(Real(0), Real(-1));
  Real theta = pi_real() * num / den;
  return exp_i(theta);
}

std::complex<double> to_double(const Complex& z) {
  return {z.re.convert_to<double>(), z.im.convert_to<double>()};
}

Complex from_double(std::complex<double> z) { return Complex(Real(z.real()), Real(z.imag())); }

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Complex(1);
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out(c, r) = sicg::conj((*this)(r, c));
  return out;
}

CMatrix CMatrix::conjugate() const {
  CMatrix out(rows_, cols_);
  for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = sicg::conj(data_[i]);
  return out;
}

Complex CMatrix::trace() const {
  Complex t;
  for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(const Complex& s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
  CMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const Complex& x = a(i, k);
      if (x.re == 0 && x.im == 0) continue;
      for (int j = 0; j < b.cols(); ++j) out(i, j) += x * b(k, j);
    }
  return out;
}

Real max_abs(const CMatrix& a) {
  Real m = 0;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) {
      Real v = abs(a(r, c));
      if (v > m) m = v;
    }
  return m;
}

Real max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix shape mismatch");
  Real m = 0;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) {
      Real v = abs(a(r, c) - b(r, c));
      if (v > m) m = v;
    }
  return m;
}

CVector mat_vec(const CMatrix& a, const CVector& v) {
  CVector out(a.rows());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out[r] += a(r, c) * v[c];
  return out;
}

Complex inner(const CVector& a, const CVector& b) {
  Complex s;
  for (size_t i = 0; i < a.size(); ++i) s += conj(a[i]) * b[i];
  return s;
}

std::vector<Real> solve_linear(std::vector<Real> a, std::vector<Real> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (boost::multiprecision::abs(a[r * n + col]) > boost::multiprecision::abs(a[piv * n + col])) piv = r;
    if (a[piv * n + col] == 0) throw std::runtime_error("singular linear system");
    if (piv != col) {
      for (size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (size_t r = col + 1; r < n; ++r) {
      Real f = a[r * n + col] / a[col * n + col];
      if (f == 0) continue;
      for (size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Real> x(n);
  for (size_t i = n; i-- > 0;) {
    Real s = b[i];
    for (size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * x[c];
    x[i] = s / a[i * n + i];
  }
  return x;
}

std::string to_fixed(const Real& x, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

Real parse_real(const std::string& text) {
  try {
    return Real(text);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a decimal number: " + text);
  }
}

}  // namespace sicg
