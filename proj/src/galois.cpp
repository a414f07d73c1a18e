#include "sicg/galois.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>

#include "sicg/clifford.hpp"
#include "sicg/cyclotomic.hpp"
#include "sicg/errors.hpp"
#include "sicg/parallel.hpp"
#include "sicg/weyl_heisenberg.hpp"

namespace sicg {

ResidueMatrix h_matrix(long k, long dbar) {
  if (!is_unit(k, dbar)) throw NotCoprime("k = " + std::to_string(k) + " is not a unit mod " + std::to_string(dbar));
  return ResidueMatrix(dbar, 1, 0, 0, mod(k, dbar));
}

ResidueMatrix derive_G(const GaloisDatum& g) {
  const long n = g.f.modulus();
  return g.f.inverse().scaled(g.f.det()) * h_matrix(g.k, n);
}

Pair derive_r(const GaloisDatum& g, long d) {
  Pair q{mod(g.q[0], d), mod(g.q[1], d)};
  if (d % 3 != 0) {
    if (q[0] != 0 || q[1] != 0) throw BadRVector("q must vanish mod d when 3 does not divide d");
    return {0, 0};
  }
  const long t = d / 3;
  if (q[0] % t != 0 || q[1] % t != 0) throw BadRVector("q is not a multiple of d/3");
  // r = -(3k/d) H^-1 q = (-k u1, -u2) mod 3 with q = (d/3) u.
  return {mod(-g.k * (q[0] / t), 3), mod(-(q[1] / t), 3)};
}

GaloisDatum compose(const GaloisDatum& g1, const GaloisDatum& g2, long d) {
  const long n = g1.f.modulus();
  ResidueMatrix h1 = h_matrix(g1.k, n);
  ResidueMatrix conj2 = h1 * g2.f * h1.inverse();
  GaloisDatum out;
  out.k = mod(g1.k * g2.k, n);
  out.f = conj2 * g1.f;
  Pair a = h1.apply({mod(g2.q[0], n), mod(g2.q[1], n)});
  Pair b = conj2.apply({mod(g1.q[0], n), mod(g1.q[1], n)});
  out.q = {mod(a[0] + b[0], d), mod(a[1] + b[1], d)};
  return out;
}

Theorem1Result theorem1_check(long k, const Pair& p, const ResidueMatrix& f, long d, const Real& tol) {
  const long n = dbar_of(d);
  const long m = tau_conductor(d);
  const long kk = lift_unit(k, n, m);
  Theorem1Result out;

  // D_p has entry tau^{e(p, s)} at (s + p1, s); H p keeps p1.
  Pair hp{mod(p[0], n), mod(k * p[1], n)};
  out.displacement = true;
  for (long s = 0; s < d && out.displacement; ++s)
    out.displacement = galois_apply(kk, tau_power(d, displacement_exponent(p, s, d))) == tau_power(d, displacement_exponent(hp, s, d));

  if (f.det() != 1 || !is_prime_matrix(f, n)) throw std::invalid_argument("theorem1_check needs a prime matrix of determinant 1");
  // sqrt(d) U_F = e^{i theta} tau^{beta^-1 (delta r^2 - 2 r s + alpha s^2)}; the phase is dropped.
  const long binv = inverse_mod(f.beta(), n);
  CMatrix image(static_cast<int>(d), static_cast<int>(d));
  for (long r = 0; r < d; ++r)
    for (long s = 0; s < d; ++s) {
      long e = binv * mod(f.delta() * r * r - 2 * r * s + f.alpha() * s * s, 2 * n);
      image(static_cast<int>(r), static_cast<int>(s)) = embed(galois_apply(kk, tau_power(d, mod(e, 2 * n))));
    }
  ResidueMatrix h = h_matrix(k, n);
  CMatrix target = symplectic_unitary(h * f * h.inverse(), d);
  out.unitary = equal_up_to_phase(image, target * Complex(boost::multiprecision::sqrt(Real(d))), tol);
  return out;
}

namespace {

Complex sigma_pow(long j) { return exp_i_pi(2 * mod(j, 3), 3); }

// <r, p> mod 3, with p read mod 3 (3 | dbar whenever r != 0).
long r_pairing(const Pair& r, const Pair& p) { return mod(symplectic_form(r, {mod(p[0], 3), mod(p[1], 3)}, 3), 3); }

}  // namespace

OverlapTable overlap_action(const OverlapTable& chi, const ResidueMatrix& g, const Pair& r) {
  const long d = chi.dimension();
  const long n = chi.dbar();
  const bool twisted = mod(r[0], 3) != 0 || mod(r[1], 3) != 0;
  if (twisted && d % 3 != 0) throw BadRVector("r != 0 needs 3 | d");
  std::vector<Complex> v(static_cast<size_t>(n * n));
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) {
      Complex x = chi.at(g.apply({a, b}));
      if (twisted) x = sigma_pow(r_pairing({mod(r[0], 3), mod(r[1], 3)}, {a, b})) * x;
      v[static_cast<size_t>(a * n + b)] = x;
    }
  return OverlapTable(d, std::move(v));
}

CMatrix reconstruct_from_overlaps(const OverlapTable& chi, long k) {
  const long d = chi.dimension();
  const long n = chi.dbar();
  const RootTable& rt = roots(d);
  CMatrix pi(static_cast<int>(d), static_cast<int>(d));
  const Real inv_d = Real(1) / d;
  // (D_q^dagger)_{s, s+q1} = tau^{-e(q, s)}.
  for (long a = 0; a < d; ++a)
    for (long b = 0; b < d; ++b) {
      Complex c = chi.at({a, b}) * inv_d;
      Pair q{a, mod(k * b, n)};
      for (long s = 0; s < d; ++s) pi(static_cast<int>(s), static_cast<int>(mod(s + q[0], d))) += c * rt.tau_pow(-displacement_exponent(q, s, d));
    }
  return pi;
}

bool verify_action_is_fiducial(const OverlapTable& chi, const Real& tol, long k) {
  FiducialProjector fp;
  fp.d = chi.dimension();
  fp.pi = reconstruct_from_overlaps(chi, k);
  try {
    return verify_sic(fp, tol).pass;
  } catch (const Error&) {
    return false;
  }
}

bool admits_fiducial_action(const OverlapTable& chi, const ResidueMatrix& g, const Real& tol) {
  const long d = chi.dimension(), n = chi.dbar();
  const long rmax = d % 3 == 0 ? 3 : 1;
  for (long k : {g.det(), mod(-g.det(), n)})
    for (long r0 = 0; r0 < rmax; ++r0)
      for (long r1 = 0; r1 < rmax; ++r1)
        if (verify_action_is_fiducial(overlap_action(chi, g, {r0, r1}), tol, k)) return true;
  return false;
}

namespace {

// LLL with delta = 3/4 on integer row vectors stored exactly in Real (the caller
// raises the precision so every entry and inner product is an exact integer).
void lll_reduce(std::vector<std::vector<Real>>& b) {
  const size_t n = b.size();
  if (n < 2) return;
  const size_t m = b[0].size();
  auto dot = [&](const std::vector<Real>& x, const std::vector<Real>& y) {
    Real s = 0;
    for (size_t i = 0; i < m; ++i) s += x[i] * y[i];
    return s;
  };
  std::vector<std::vector<Real>> bs(n), mu(n, std::vector<Real>(n, Real(0)));
  std::vector<Real> bb(n);
  bs[0] = b[0];
  bb[0] = dot(b[0], b[0]);
  size_t k = 1, kmax = 0;
  auto red = [&](size_t kk, size_t l) {
    if (boost::multiprecision::abs(mu[kk][l]) <= Real(0.5)) return;
    Real q = boost::multiprecision::round(mu[kk][l]);
    for (size_t i = 0; i < m; ++i) b[kk][i] -= q * b[l][i];
    mu[kk][l] -= q;
    for (size_t i = 0; i < l; ++i) mu[kk][i] -= q * mu[l][i];
  };
  auto swap = [&](size_t kk) {
    std::swap(b[kk], b[kk - 1]);
    for (size_t j = 0; j + 1 < kk; ++j) std::swap(mu[kk][j], mu[kk - 1][j]);
    Real u = mu[kk][kk - 1];
    Real big = bb[kk] + u * u * bb[kk - 1];
    mu[kk][kk - 1] = u * bb[kk - 1] / big;
    std::vector<Real> old_prev = bs[kk - 1], old_k = bs[kk];
    for (size_t i = 0; i < m; ++i) {
      bs[kk - 1][i] = old_k[i] + u * old_prev[i];
      bs[kk][i] = -mu[kk][kk - 1] * old_k[i] + (bb[kk] / big) * old_prev[i];
    }
    bb[kk] = bb[kk - 1] * bb[kk] / big;
    bb[kk - 1] = big;
    for (size_t i = kk + 1; i <= kmax; ++i) {
      Real t = mu[i][kk];
      mu[i][kk] = mu[i][kk - 1] - u * t;
      mu[i][kk - 1] = t + mu[kk][kk - 1] * mu[i][kk];
    }
  };
  while (k < n) {
    if (k > kmax) {
      kmax = k;
      bs[k] = b[k];
      for (size_t j = 0; j < k; ++j) {
        mu[k][j] = dot(b[k], bs[j]) / bb[j];
        for (size_t i = 0; i < m; ++i) bs[k][i] -= mu[k][j] * bs[j][i];
      }
      bb[k] = dot(bs[k], bs[k]);
    }
    red(k, k - 1);
    if (bb[k] < (Real(0.75) - mu[k][k - 1] * mu[k][k - 1]) * bb[k - 1]) {
      swap(k);
      k = std::max<size_t>(1, k - 1);
      continue;
    }
    for (size_t l = k - 1; l-- > 0;) red(k, l);
    ++k;
  }
}

}  // namespace

std::optional<std::vector<BigInt>> integer_relation(const std::vector<Real>& x, int digits) {
  const size_t n = x.size();
  if (n == 0 || digits < 10) return std::nullopt;
  const int scale_digits = digits - 5;
  std::vector<std::vector<Real>> basis;
  std::vector<Real> xs;
  {
    PrecisionScope wide(static_cast<unsigned>(2 * digits + 40));
    for (const auto& xi : x) xs.emplace_back(xi);
    const Real scale = boost::multiprecision::pow(Real(10), scale_digits);
    for (size_t i = 0; i < n; ++i) {
      std::vector<Real> row(n + 1, Real(0));
      row[i] = 1;
      row[n] = boost::multiprecision::round(scale * xs[i]);
      basis.push_back(std::move(row));
    }
    lll_reduce(basis);
  }
  const double bound = std::max(10.0, std::pow(10.0, static_cast<double>(scale_digits) / static_cast<double>(n) - 3.0));
  const Real resid_tol = ten_to_minus(3 * digits / 4);
  std::optional<std::vector<BigInt>> best;
  double best_size = 0;
  for (const auto& row : basis) {
    if (row[0] == 0) continue;
    double size = 0;
    for (size_t i = 0; i < n; ++i) size = std::max(size, boost::multiprecision::abs(row[i]).convert_to<double>());
    if (size > bound) continue;
    Real resid = 0;
    for (size_t i = 0; i < n; ++i) resid += row[i] * x[i];
    if (boost::multiprecision::abs(resid) > resid_tol * size) continue;
    if (best && size >= best_size) continue;
    std::vector<BigInt> c;
    for (size_t i = 0; i < n; ++i) c.emplace_back(row[i].convert_to<long long>());
    best = std::move(c);
    best_size = size;
  }
  return best;
}

bool in_real_field(const Complex& x, const std::vector<long>& radicands, int digits) {
  const Real mag = std::max(Real(1), abs(x));
  if (boost::multiprecision::abs(x.im) > ten_to_minus(3 * digits / 4) * mag) return false;
  std::vector<Real> v{x.re};
  const size_t m = radicands.size();
  for (size_t mask = 0; mask < (size_t{1} << m); ++mask) {
    Real p = 1;
    for (size_t j = 0; j < m; ++j)
      if (mask >> j & 1) p *= boost::multiprecision::sqrt(Real(radicands[j]));
    v.push_back(p);
  }
  return integer_relation(v, digits).has_value();
}

GaloisElement multiply(const GaloisElement& a, const GaloisElement& b, long d) {
  const long n = a.g.modulus();
  GaloisElement out;
  out.g = a.g * b.g;
  out.k = mod(a.k * b.k, n);
  if (d % 3 == 0) {
    Pair t = b.g.inverse().scaled(b.g.det()).apply({a.r[0], a.r[1]});
    out.r = {mod(a.k * b.r[0] + t[0], 3), mod(a.k * b.r[1] + t[1], 3)};
  }
  return out;
}

GaloisDatum datum_for(const GaloisElement& e, long d) {
  const long n = e.g.modulus();
  GaloisDatum out;
  out.k = mod(e.k, n);
  const long s = mod(e.g.det() * inverse_mod(out.k, n), n);
  if (s != 1 && s != n - 1) throw NotCoprime("k is not +-det G");
  ResidueMatrix h = h_matrix(out.k, n);
  out.f = (h * e.g.inverse()).scaled(s);
  if (d % 3 == 0) {
    const long kinv3 = inverse_mod(mod(out.k, 3), 3);
    long u0 = mod(-kinv3 * e.r[0], 3);
    long u1 = mod(-kinv3 * mod(out.k * e.r[1], 3), 3);
    out.q = {u0 * (d / 3), u1 * (d / 3)};
  } else if (e.r[0] != 0 || e.r[1] != 0) {
    throw BadRVector("r != 0 needs 3 | d");
  }
  return out;
}

int structure_case(bool sqrt_d_in_e, bool p_nonempty) {
  if (sqrt_d_in_e) return p_nonempty ? 2 : 1;
  return p_nonempty ? 4 : 3;
}

namespace {

using Bits = std::vector<std::uint64_t>;

bool test_bit(const Bits& b, size_t i) { return b[i / 64] >> (i % 64) & 1; }
void set_bit(Bits& b, size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }
size_t popcount(const Bits& b) {
  size_t c = 0;
  for (auto w : b) c += static_cast<size_t>(__builtin_popcountll(w));
  return c;
}
bool subset(const Bits& a, const Bits& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

// Closure of generators in a finite group given by a multiplication callback.
template <class Mul>
Bits close_group(size_t size, int identity, const std::vector<int>& gens, Mul mul) {
  Bits out((size + 63) / 64, 0);
  std::vector<int> queue{identity};
  set_bit(out, static_cast<size_t>(identity));
  for (size_t i = 0; i < queue.size(); ++i)
    for (int g : gens) {
      int x = mul(queue[i], g);
      if (!test_bit(out, static_cast<size_t>(x))) {
        set_bit(out, static_cast<size_t>(x));
        queue.push_back(x);
      }
    }
  return out;
}

struct Subgroup {
  Bits bits;
  std::vector<int> gens;
  size_t order = 0;
};

// Every subgroup of a finite group, built by joining cyclic subgroups.
std::vector<Subgroup> all_subgroups(const std::vector<std::vector<int>>& table, int identity, size_t limit) {
  const size_t q = table.size();
  auto mul = [&](int a, int b) { return table[static_cast<size_t>(a)][static_cast<size_t>(b)]; };
  std::map<Bits, Subgroup> seen;
  std::vector<Subgroup> cyclic;
  for (size_t x = 0; x < q; ++x) {
    Subgroup s;
    s.gens = {static_cast<int>(x)};
    s.bits = close_group(q, identity, s.gens, mul);
    s.order = popcount(s.bits);
    if (seen.emplace(s.bits, s).second) cyclic.push_back(s);
  }
  std::vector<Subgroup> frontier = cyclic;
  while (!frontier.empty()) {
    std::vector<Subgroup> next;
    for (const auto& a : frontier)
      for (const auto& c : cyclic) {
        if (subset(c.bits, a.bits)) continue;
        Subgroup j;
        j.gens = a.gens;
        j.gens.push_back(c.gens[0]);
        j.bits = close_group(q, identity, j.gens, mul);
        j.order = popcount(j.bits);
        if (seen.emplace(j.bits, j).second) {
          next.push_back(j);
          if (seen.size() > limit) throw SearchBudgetExceeded("more than " + std::to_string(limit) + " subgroups");
        }
      }
    frontier = std::move(next);
  }
  std::vector<Subgroup> out;
  for (auto& [bits, s] : seen) out.push_back(std::move(s));
  std::stable_sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) { return a.order < b.order; });
  return out;
}

const std::vector<Pair>& point_list() {
  static const std::vector<Pair> pts{{1, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 3}, {3, 2}, {1, 4}};
  return pts;
}

int relation_digits() { return static_cast<int>(working_digits()) - 10; }

// Double-precision screen: the imaginary part of an element of a real field vanishes.
bool plausibly_real(const std::vector<Complex>& t, const std::vector<double>& scale) {
  for (size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i].im.convert_to<double>()) > 1e-9 * (1 + scale[i])) return false;
  return true;
}

bool all_in_field(const std::vector<Complex>& t, const std::vector<long>& radicands) {
  for (const auto& x : t)
    if (!in_real_field(x, radicands, relation_digits())) return false;
  return true;
}

// Orbit sums of probe elements of E-bar: tau^j x_i, tau^j y_i, tau^j x_i x_{i+1} and tau,
// with x_i = chi_{p_i} and y_i = chi_{p_i} chi_{p_{i+1}} chi_{-p_i - p_{i+1}}. An automorphism
// acting by (G, r, k) sends x_i to sigma^<r, p_i> chi_{G p_i} and tau^j to tau^{jk}; the sigma
// factors cancel in y_i. The sum over a Galois group lies in its fixed field.
class ProbeSums {
 public:
  ProbeSums(long d, int points) : d_(d), n_(dbar_of(d)), three_(d % 3 == 0) {
    const size_t np = std::min<size_t>(static_cast<size_t>(std::max(2, points)), point_list().size());
    pts_.assign(point_list().begin(), point_list().begin() + static_cast<long>(np));
    js_ = {0, 1};
    for (long j = 2; j <= 4 && j < n_; ++j) js_.push_back(j);
    // tau^(2d/3) = sigma when 3 | d.
    if (three_ && std::find(js_.begin(), js_.end(), 2 * d / 3) == js_.end()) js_.push_back(2 * d / 3);
    t_.assign(js_.size() * 3 * np + 1, Complex());
    scale_.assign(t_.size(), 0.0);
  }

  void add(const OverlapTable& chi, const ResidueMatrix& g, const Pair& r, long k) {
    const size_t np = pts_.size();
    const RootTable& rt = roots(d_);
    std::vector<Complex> x(np), y(np);
    for (size_t i = 0; i < np; ++i) {
      const Pair& p1 = pts_[i];
      const Pair& p2 = pts_[(i + 1) % np];
      Complex raw = chi.at(g.apply(p1));
      y[i] = raw * chi.at(g.apply(p2)) * chi.at(g.apply({-p1[0] - p2[0], -p1[1] - p2[1]}));
      x[i] = three_ ? sigma_pow(r_pairing(r, p1)) * raw : raw;
    }
    const size_t rows = 3 * np;
    for (size_t w = 0; w < js_.size(); ++w) {
      const Complex& tk = rt.tau_pow(js_[w] * k);
      for (size_t i = 0; i < np; ++i) {
        const Complex xx = x[i] * x[(i + 1) % np];
        const size_t o = w * rows;
        t_[o + i] += x[i] * tk;
        t_[o + np + i] += y[i] * tk;
        t_[o + 2 * np + i] += xx * tk;
        scale_[o + i] += abs(x[i]).convert_to<double>();
        scale_[o + np + i] += abs(y[i]).convert_to<double>();
        scale_[o + 2 * np + i] += abs(xx).convert_to<double>();
      }
    }
    t_.back() += rt.tau_pow(k);
    scale_.back() += 1;
  }

  bool in_field(const std::vector<long>& radicands) const { return plausibly_real(t_, scale_) && all_in_field(t_, radicands); }

 private:
  long d_, n_;
  bool three_;
  std::vector<Pair> pts_;
  std::vector<long> js_;
  std::vector<Complex> t_;
  std::vector<double> scale_;
};

// Lifted elements (coset, r, sign) with k = sign * det(rep), encoded as c * 18 + (3 r1 + r2) * 2 + sign bit.
struct LiftSpace {
  long d = 0, n = 0;
  const CosetTable* ct = nullptr;
  std::vector<long> det;        // det of each representative mod n
  std::vector<ResidueMatrix> adj;  // det(G) G^-1 mod n

  size_t size() const { return ct->representatives.size() * 18; }
  static int encode(int c, const Pair& r, int sbit) { return c * 18 + static_cast<int>(r[0] * 3 + r[1]) * 2 + sbit; }
  int coset(int e) const { return e / 18; }
  Pair r(int e) const { return {(e % 18) / 2 / 3, (e % 18) / 2 % 3}; }
  long k(int e) const { return e % 2 ? mod(-det[static_cast<size_t>(coset(e))], n) : det[static_cast<size_t>(coset(e))]; }
  int from(int c, const Pair& r, long k) const { return encode(c, r, k == det[static_cast<size_t>(c)] ? 0 : 1); }
  int mul(int a, int b) const {
    const int ca = coset(a), cb = coset(b);
    const int c = ct->product[static_cast<size_t>(ca)][static_cast<size_t>(cb)];
    const long k = mod(this->k(a) * this->k(b), n);
    Pair r12{0, 0};
    if (d % 3 == 0) {
      Pair ra = r(a), rb = r(b);
      Pair t = adj[static_cast<size_t>(cb)].apply(ra);
      r12 = {mod(this->k(a) * rb[0] + t[0], 3), mod(this->k(a) * rb[1] + t[1], 3)};
    }
    return from(c, r12, k);
  }
  GaloisElement element(int e) const { return {ct->representatives[static_cast<size_t>(coset(e))], r(e), k(e)}; }
};

}  // namespace

DiscoveryResult discover_galois_orbit(const FiducialProjector& pi, const StabilizerReport& st, const DiscoveryOptions& options) {
  const long d = pi.d;
  const long n = dbar_of(d);
  const bool three = d % 3 == 0;
  DiscoveryResult res;
  res.d = d;
  res.s_bar = st.s_bar;
  res.normalizer = normalizer(st.s_bar, n, kDefaultGroupCap, options.threads);
  res.centralizer = centralizer(st.s_bar, n, kDefaultGroupCap, options.threads);
  const CosetTable ct = coset_table(res.normalizer, res.s_bar);
  const size_t q = ct.representatives.size();
  res.quotient_order = q;

  // Probes: x_i = chi_{p_i} picks up sigma^<r, p_i>; y_i = chi_p chi_q chi_{-p-q} with
  // p = p_i, q = p_{i+1} does not. Both, times tau, pick up tau^k.
  const OverlapTable chi = overlaps(pi);
  const size_t np = std::min<size_t>(static_cast<size_t>(std::max(2, options.test_points)), point_list().size());
  std::vector<Pair> pts(point_list().begin(), point_list().begin() + static_cast<long>(np));
  // r-free products chi_p chi_q chi_s with p + q + s = 0: (p_i, p_{i+1}), (p_i, p_{i+2}), (p_i, p_i).
  std::vector<std::vector<Complex>> xv(q, std::vector<Complex>(np)), rfree(q, std::vector<Complex>(3 * np));
  for (size_t c = 0; c < q; ++c) {
    const ResidueMatrix& g = ct.representatives[c];
    auto triple = [&](const Pair& p1, const Pair& p2) {
      return chi.at(g.apply(p1)) * chi.at(g.apply(p2)) * chi.at(g.apply({-p1[0] - p2[0], -p1[1] - p2[1]}));
    };
    for (size_t i = 0; i < np; ++i) {
      xv[c][i] = chi.at(g.apply(pts[i]));
      rfree[c][i] = triple(pts[i], pts[(i + 1) % np]);
      rfree[c][np + i] = triple(pts[i], pts[(i + 2) % np]);
      rfree[c][2 * np + i] = triple(pts[i], pts[i]);
    }
  }
  auto passes = [&](const std::vector<Complex>& t, const std::vector<double>& scale) {
    return plausibly_real(t, scale) && all_in_field(t, options.radicands);
  };

  LiftSpace ls;
  ls.d = d;
  ls.n = n;
  ls.ct = &ct;
  for (const auto& rep : ct.representatives) {
    ls.det.push_back(rep.det());
    ls.adj.push_back(rep.inverse().scaled(rep.det()));
  }
  // chi_{Sp} = chi_p for S in S-bar forces <r, (S - I) p> = 0 mod 3.
  std::vector<Pair> valid_r{{0, 0}};
  if (three) {
    valid_r.clear();
    for (long a = 0; a < 3; ++a)
      for (long b = 0; b < 3; ++b) {
        bool ok = true;
        for (const auto& s : st.s_bar.elements)
          for (const Pair& e : {Pair{1, 0}, Pair{0, 1}}) {
            Pair sp = s.apply(e);
            if (r_pairing({a, b}, {sp[0] - e[0], sp[1] - e[1]}) != 0) ok = false;
          }
        if (ok) valid_r.push_back({a, b});
      }
  }
  const size_t lsize = ls.size();
  auto lmul = [&](int a, int b) { return ls.mul(a, b); };
  const int lid = ls.from(ct.identity, {0, 0}, 1);
  auto qmul = [&](int a, int b) { return ct.product[static_cast<size_t>(a)][static_cast<size_t>(b)]; };

  // Lifts of a subgroup: each generator gets (r, sign of k), plus optionally (I, s, -1).
  // A lift is kept when it has at most one r for each (coset, k).
  auto lifts = [&](const Subgroup& sub) {
    std::vector<int> kgens;
    Bits h((q + 63) / 64, 0);
    set_bit(h, static_cast<size_t>(ct.identity));
    for (size_t c = 0; c < q; ++c)
      if (test_bit(sub.bits, c) && !test_bit(h, c)) {
        kgens.push_back(static_cast<int>(c));
        h = close_group(q, ct.identity, kgens, qmul);
      }
    const size_t per_gen = valid_r.size() * 2;
    size_t combos = valid_r.size() + 1;
    for (size_t i = 0; i < kgens.size(); ++i) {
      combos *= per_gen;
      if (combos > options.max_lifts) throw SearchBudgetExceeded("more than " + std::to_string(options.max_lifts) + " lifts");
    }
    std::set<Bits> models;
    for (size_t combo = 0; combo < combos; ++combo) {
      size_t x = combo;
      std::vector<int> gens;
      for (int g : kgens) {
        size_t o = x % per_gen;
        x /= per_gen;
        gens.push_back(LiftSpace::encode(g, valid_r[o / 2], static_cast<int>(o % 2)));
      }
      if (x > 0) gens.push_back(ls.from(ct.identity, valid_r[x - 1], n - 1));
      Bits b = close_group(lsize, lid, gens, lmul);
      bool ok = true;
      for (size_t c = 0; c < q && ok; ++c)
        for (int sb = 0; sb < 2 && ok; ++sb) {
          int count = 0;
          for (long rr = 0; rr < 9; ++rr) count += test_bit(b, static_cast<size_t>(LiftSpace::encode(static_cast<int>(c), {rr / 3, rr % 3}, sb)));
          ok = count <= 1;
        }
      if (ok) models.insert(b);
    }
    return models;
  };

  auto model_passes = [&](const Bits& b) {
    ProbeSums probe(d, options.test_points);
    for (size_t e = 0; e < lsize; ++e)
      if (test_bit(b, e)) probe.add(chi, ct.representatives[static_cast<size_t>(ls.coset(static_cast<int>(e)))], ls.r(static_cast<int>(e)), ls.k(static_cast<int>(e)));
    return probe.in_field(options.radicands);
  };

  std::vector<Subgroup> subs = all_subgroups(ct.product, ct.identity, options.max_subgroups);
  res.subgroups = subs.size();
  struct Winner {
    size_t size;
    Bits bits;
  };
  std::vector<Winner> winners;
  size_t found_order = 0;
  for (const auto& sub : subs) {
    if (found_order && sub.order > found_order) break;
    // Necessary condition on the coset image alone: r-free probes (x^3 when 3 | d, else x; and triples).
    std::vector<Complex> t(4 * np);
    std::vector<double> scale(4 * np, 0.0);
    for (size_t c = 0; c < q; ++c)
      if (test_bit(sub.bits, c))
        for (size_t i = 0; i < np; ++i) {
          Complex x = three ? xv[c][i] * xv[c][i] * xv[c][i] : xv[c][i];
          t[i] += x;
          scale[i] += abs(x).convert_to<double>();
          for (size_t j = 0; j < 3; ++j) {
            t[(j + 1) * np + i] += rfree[c][j * np + i];
            scale[(j + 1) * np + i] += abs(rfree[c][j * np + i]).convert_to<double>();
          }
        }
    if (!passes(t, scale)) continue;
    for (const auto& b : lifts(sub))
      if (model_passes(b)) {
        winners.push_back({popcount(b), b});
        found_order = sub.order;
      }
  }
  if (winners.empty()) return res;
  std::stable_sort(winners.begin(), winners.end(), [](const Winner& a, const Winner& b) { return a.size < b.size; });
  res.unique_minimum = winners.size() == 1 || winners[1].size > winners[0].size;
  const Bits& img = winners.front().bits;

  Bits cosets((q + 63) / 64, 0);
  for (size_t e = 0; e < lsize; ++e)
    if (test_bit(img, e)) {
      res.image.push_back(ls.element(static_cast<int>(e)));
      set_bit(cosets, static_cast<size_t>(ls.coset(static_cast<int>(e))));
    }
  if (res.unique_minimum) {
    res.p_realized = false;
    for (const auto& e : res.image)
      if (ct.coset_of(e.g) == ct.identity && e.k == n - 1) res.p_realized = true;
  }

  res.unique_r = true;
  for (size_t i = 0; i < res.image.size(); ++i)
    for (size_t j = i + 1; j < res.image.size(); ++j)
      if (res.image[i].g == res.image[j].g && res.image[i].k == res.image[j].k && res.image[i].r != res.image[j].r) res.unique_r = false;

  res.homomorphism = true;
  for (const auto& a : res.image)
    for (const auto& b : res.image) {
      GaloisDatum c = compose(datum_for(a, d), datum_for(b, d), d);
      GaloisElement law = multiply(a, b, d);
      if (ct.coset_of(derive_G(c)) != ct.coset_of(law.g) || derive_r(c, d) != law.r || c.k != law.k) res.homomorphism = false;
    }

  std::vector<ResidueMatrix> members;
  for (size_t i = 0; i < ct.codes.size(); ++i)
    if (test_bit(cosets, static_cast<size_t>(ct.coset_index[i]))) members.push_back(ResidueMatrix::from_code(n, ct.codes[i]));
  res.image_g = group_from_elements(n, std::move(members));
  for (size_t c = 0; c < q; ++c)
    if (!test_bit(cosets, c)) res.non_data.push_back(ct.representatives[c]);
  try {
    res.invariants = quotient_invariants(res.image_g, res.s_bar);
    res.image_abelian = true;
  } catch (const NotAbelian&) {
  }
  try {
    res.centralizer_invariants = quotient_invariants(res.centralizer, res.s_bar);
  } catch (const Error&) {
  }
  res.equals_centralizer = res.image_g.elements == res.centralizer.elements;
  return res;
}

std::vector<GaloisElement> discover_doublet_map(const FiducialProjector& a, const FiducialProjector& b, const DiscoveryResult& ka, const StabilizerReport& sb,
                                                const std::vector<long>& ec_radicands, int test_points, int threads) {
  if (threads <= 0) threads = default_threads();
  const long d = a.d;
  const long n = dbar_of(d);
  const bool three = d % 3 == 0;
  const OverlapTable ca = overlaps(a), cb = overlaps(b);
  if (ka.s_bar.order() != sb.s_bar.order()) return {};

  // g_s composed with gamma acts on chi^a as the law product (G_s, r_s, k_s)(G, r, k), landing in chi^b.
  // G_s must carry S-bar(a) onto S-bar(b); one representative per coset G_s S-bar(a).
  std::vector<ResidueMatrix> cands;
  std::set<std::uint64_t> used;
  for (const auto& g : gl2(n)) {
    if (used.count(g.code())) continue;
    ResidueMatrix gi = g.inverse();
    bool ok = std::all_of(ka.s_bar.elements.begin(), ka.s_bar.elements.end(), [&](const ResidueMatrix& s) { return sb.s_bar.contains(g * s * gi); });
    if (!ok) continue;
    for (const auto& s : ka.s_bar.elements) used.insert((g * s).code());
    cands.push_back(g);
  }
  std::vector<Pair> rs{{0, 0}};
  if (three) {
    rs.clear();
    for (long x = 0; x < 3; ++x)
      for (long y = 0; y < 3; ++y) rs.push_back({x, y});
  }
  const unsigned digits = working_digits();
  std::vector<std::vector<GaloisElement>> found(static_cast<size_t>(std::max(1, threads)));
  parallel_chunks(cands.size(), threads, [&](size_t lo, size_t hi, int w) {
    PrecisionScope ps(digits);
    for (size_t i = lo; i < hi; ++i)
      for (const auto& rsv : rs)
        for (long sign : {1L, -1L}) {
          const GaloisElement head{cands[i], rsv, mod(sign * cands[i].det(), n)};
          ProbeSums probe(d, test_points);
          for (const auto& e : ka.image) {
            probe.add(ca, e.g, e.r, e.k);
            GaloisElement m = multiply(head, e, d);
            probe.add(cb, m.g, m.r, m.k);
          }
          if (probe.in_field(ec_radicands)) found[static_cast<size_t>(w)].push_back(head);
        }
  });
  std::vector<GaloisElement> out;
  for (auto& part : found) out.insert(out.end(), part.begin(), part.end());
  return out;
}

std::size_t doublet_alignment(const std::vector<GaloisElement>& maps, const GaloisElement& tabulated, const MatrixGroup& sbar_a,
                              const MatrixGroup& sbar_b) {
  const long n = tabulated.g.modulus();
  std::size_t hits = 0;
  for (const auto& e : maps) {
    if (e.r != tabulated.r || e.kappa() != tabulated.kappa()) continue;
    for (const auto& s : sbar_a.elements) {
      ResidueMatrix m = tabulated.g * (e.g * s).inverse();
      if (m.det() != 1 && m.det() != mod(-1, n)) continue;
      ResidueMatrix mi = m.inverse();
      bool normalizes = std::all_of(sbar_b.elements.begin(), sbar_b.elements.end(), [&](const ResidueMatrix& t) { return sbar_b.contains(m * t * mi); });
      if (normalizes) ++hits;
    }
  }
  return hits;
}

MatrixGroup span_group(const ResidueMatrix& g, long n) {
  std::vector<ResidueMatrix> els;
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) {
      ResidueMatrix m = ResidueMatrix::scalar(n, a) + g.scaled(b);
      if (m.is_invertible()) els.push_back(m);
    }
  return group_from_elements(n, std::move(els));
}

MatrixGroup type_a_centralizer_formula(const ResidueMatrix& f, long n) {
  if (n % 3 != 0) throw std::invalid_argument("type-a formula needs 3 | n");
  ResidueMatrix fi = f + ResidueMatrix::scalar(n, n - 1);
  long e[4] = {fi.alpha(), fi.beta(), fi.gamma(), fi.delta()};
  for (long x : e)
    if (x % 3 != 0) throw std::invalid_argument("F - I is not divisible by 3");
  // Other solutions of 3G = F - I differ by (n/3) H, which the H term already covers.
  ResidueMatrix g(n, e[0] / 3, e[1] / 3, e[2] / 3, e[3] / 3);
  const long t = n / 3;
  std::set<ResidueMatrix> els;
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) {
      ResidueMatrix base = ResidueMatrix::scalar(n, a) + g.scaled(b);
      for (long h = 0; h < 81; ++h) {
        ResidueMatrix m = base + ResidueMatrix(n, t * (h % 3), t * (h / 3 % 3), t * (h / 9 % 3), t * (h / 27));
        if (m.is_invertible()) els.insert(m);
      }
    }
  return group_from_elements(n, std::vector<ResidueMatrix>(els.begin(), els.end()));
}

FiducialProjector apply_automorphism(const ExpressionForm& form, const AutomorphismSpec& spec) {
  FiducialProjector out;
  out.d = form.d;
  out.pi = form.evaluate(spec.apply(form.valuation()));
  out.provenance = Provenance::constructed;
  out.orbit = form.orbit;
  return out;
}

GUnitaryReport g_unitary_check(const ExpressionForm& form, const AutomorphismSpec& spec) {
  if (!spec.f) throw MissingExpressionData("automorphism " + spec.name + " has no Clifford element");
  const long d = form.d;
  const Valuation v = form.valuation();
  const Valuation gv = spec.apply(v);
  const CMatrix pi = form.evaluate(v);
  const CMatrix gpi = form.evaluate(gv);
  ExtendedOperator u = extended_unitary({spec.q, *spec.f}, d);
  // U = M K^c, so U^dagger X U = (M^dagger X M) conjugated when c = 1.
  CMatrix y = u.matrix.adjoint() * gpi * u.matrix;
  if (u.conjugate) y = y.conjugate();
  GUnitaryReport out;
  out.residual = max_abs_diff(y, pi);

  int s = 0;
  for (int j = 1; j < d; ++j)
    if (pi(j, j).re > pi(s, s).re) s = j;
  CVector psi(static_cast<size_t>(d)), gpsi(static_cast<size_t>(d));
  for (int r = 0; r < d; ++r) {
    psi[static_cast<size_t>(r)] = pi(r, s);
    gpsi[static_cast<size_t>(r)] = gpi(r, s);
  }
  CVector vpsi = mat_vec(u.matrix.adjoint(), gpsi);
  if (u.conjugate)
    for (auto& x : vpsi) x = conj(x);
  const Complex nrm = inner(psi, psi);
  Complex lambda = inner(psi, vpsi) / nrm;
  out.lambda_sq = norm(lambda);
  out.ratio_g = (gpi(s, s) / pi(s, s)).re;

  // g^-1 = g^(order - 1), found by iterating the substitution on the generators.
  const Real tol = ten_to_minus(static_cast<int>(working_digits()) / 2);
  auto same = [&](const Valuation& x) {
    for (const auto& [name, value] : x) {
      auto it = v.find(name);
      Complex ref = it != v.end() ? it->second : (name == "i" ? Complex(Real(0), Real(1)) : value);
      if (abs(value - ref) > tol) return false;
    }
    return true;
  };
  std::vector<Valuation> orbit{v, gv};
  try {
    for (int j = 1; j <= 24; ++j) {
      if (same(orbit.back())) {
        out.order = j;
        break;
      }
      orbit.push_back(spec.apply(orbit.back()));
    }
  } catch (const Error&) {
  }
  if (out.order > 0) {
    CMatrix inv = form.evaluate(orbit[static_cast<size_t>(out.order - 1)]);
    out.ratio_g_inverse = (inv(s, s) / pi(s, s)).re;
  }
  return out;
}

}  // namespace sicg
