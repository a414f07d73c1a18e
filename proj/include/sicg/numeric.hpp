#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <string>
#include <vector>

namespace sicg {

using Real = boost::multiprecision::mpfr_float;

// Decimal digits carried beyond the requested working precision.
inline constexpr unsigned kGuardDigits = 10;

// Requested digits (what tolerances are quoted against). The mpfr default
// precision is this plus kGuardDigits.
unsigned working_digits();
void set_working_digits(unsigned digits);

class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

// 10^-e at the current precision.
Real ten_to_minus(int e);
// 10^-(digits/2): the cut between a true zero and precision noise.
Real structural_tolerance();

Real pi_real();

struct Complex {
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(const Real& r) : re(r), im(0) {}  // NOLINT: numeric promotion
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(int r) : re(r), im(0) {}  // NOLINT
  Complex(double r) : re(r), im(0) {}  // NOLINT
  Complex(double r, double i) : re(r), im(i) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator*=(const Real& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const Complex& o);
};

inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
inline Complex operator*(Complex a, const Complex& b) { return a *= b; }
inline Complex operator*(Complex a, const Real& s) { return a *= s; }
inline Complex operator*(const Real& s, Complex a) { return a *= s; }
inline Complex operator/(Complex a, const Complex& b) { return a /= b; }
inline Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }

inline Complex conj(const Complex& z) { return Complex(z.re, -z.im); }
inline Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
Real abs(const Complex& z);
Real arg(const Complex& z);
Complex polar(const Real& r, const Real& theta);
// Principal branches.
Complex sqrt(const Complex& z);
Complex cbrt(const Complex& z);
Complex exp_i(const Real& theta);
// e^{i pi num / den}, reduced exactly before evaluation.
Complex exp_i_pi(long num, long den);

std::complex<double> to_double(const Complex& z);
Complex from_double(std::complex<double> z);

// Dense row-major complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

  static CMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Complex& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const Complex& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  CMatrix adjoint() const;
  CMatrix conjugate() const;
  Complex trace() const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(const Complex& s);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> data_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
inline CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
inline CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
inline CMatrix operator*(CMatrix a, const Complex& s) { return a *= s; }

Real max_abs(const CMatrix& a);
Real max_abs_diff(const CMatrix& a, const CMatrix& b);

using CVector = std::vector<Complex>;
CVector mat_vec(const CMatrix& a, const CVector& v);
Complex inner(const CVector& a, const CVector& b);  // <a|b>, antilinear in a

// Solves A x = b by Gaussian elimination with partial pivoting (A row-major n x n).
std::vector<Real> solve_linear(std::vector<Real> a, std::vector<Real> b);

// Fixed-point decimal rendering with `digits` fractional digits.
std::string to_fixed(const Real& x, int digits);
Real parse_real(const std::string& text);

}  // namespace sicg
