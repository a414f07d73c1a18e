#include "sicg/residue.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "sicg/errors.hpp"
#include "sicg/parallel.hpp"

namespace sicg {

namespace {
int g_threads = 1;
}

int default_threads() { return g_threads; }
void set_default_threads(int threads) { g_threads = std::max(1, threads); }

long mod(long a, long n) {
  long r = a % n;
  return r < 0 ? r + n : r;
}

long gcd(long a, long b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool is_unit(long a, long n) { return n == 1 || gcd(mod(a, n), n) == 1; }

long inverse_mod(long a, long n) {
  if (n == 1) return 0;
  long r0 = n, r1 = mod(a, n), s0 = 0, s1 = 1;
  while (r1 != 0) {
    long q = r0 / r1;
    long t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (r0 != 1) throw NonInvertible(std::to_string(a) + " mod " + std::to_string(n));
  return mod(s0, n);
}

long dbar_of(long d) { return d % 2 == 0 ? 2 * d : d; }

ResidueMatrix::ResidueMatrix(long n, long alpha, long beta, long gamma, long delta)
    : n_(static_cast<std::int32_t>(n)),
      a_(static_cast<std::int32_t>(mod(alpha, n))),
      b_(static_cast<std::int32_t>(mod(beta, n))),
      c_(static_cast<std::int32_t>(mod(gamma, n))),
      d_(static_cast<std::int32_t>(mod(delta, n))) {
  if (n < 1) throw std::invalid_argument("modulus must be positive");
  det_ = static_cast<std::int32_t>(mod(static_cast<long>(a_) * d_ - static_cast<long>(b_) * c_, n));
}

ResidueMatrix ResidueMatrix::identity(long n) { return {n, 1, 0, 0, 1}; }
ResidueMatrix ResidueMatrix::scalar(long n, long s) { return {n, s, 0, 0, s}; }

ResidueMatrix ResidueMatrix::inverse() const {
  long k = inverse_mod(det_, n_);
  return {n_, k * d_, -k * b_, -k * c_, k * a_};
}

ResidueMatrix ResidueMatrix::pow(long e) const {
  ResidueMatrix base = e < 0 ? inverse() : *this;
  if (e < 0) e = -e;
  ResidueMatrix out = identity(n_);
  while (e > 0) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

ResidueMatrix ResidueMatrix::operator*(const ResidueMatrix& o) const {
  if (o.n_ != n_) throw std::invalid_argument("modulus mismatch");
  long a = a_, b = b_, c = c_, d = d_;
  return {n_, a * o.a_ + b * o.c_, a * o.b_ + b * o.d_, c * o.a_ + d * o.c_, c * o.b_ + d * o.d_};
}

ResidueMatrix ResidueMatrix::operator+(const ResidueMatrix& o) const {
  if (o.n_ != n_) throw std::invalid_argument("modulus mismatch");
  return {n_, static_cast<long>(a_) + o.a_, static_cast<long>(b_) + o.b_, static_cast<long>(c_) + o.c_,
          static_cast<long>(d_) + o.d_};
}

ResidueMatrix ResidueMatrix::scaled(long s) const {
  return {n_, s * a_, s * b_, s * c_, s * d_};
}

ResidueMatrix ResidueMatrix::reduced(long m) const {
  if (n_ % m != 0) throw std::invalid_argument("reduction modulus must divide the modulus");
  return {m, a_, b_, c_, d_};
}

Pair ResidueMatrix::apply(const Pair& p) const {
  return {mod(a_ * p[0] + b_ * p[1], n_), mod(c_ * p[0] + d_ * p[1], n_)};
}

std::uint64_t ResidueMatrix::code() const {
  std::uint64_t n = static_cast<std::uint64_t>(n_);
  return ((static_cast<std::uint64_t>(a_) * n + b_) * n + c_) * n + d_;
}

ResidueMatrix ResidueMatrix::from_code(long n, std::uint64_t code) {
  std::uint64_t un = static_cast<std::uint64_t>(n);
  long d = static_cast<long>(code % un);
  code /= un;
  long c = static_cast<long>(code % un);
  code /= un;
  long b = static_cast<long>(code % un);
  code /= un;
  return {n, static_cast<long>(code), b, c, d};
}

std::string ResidueMatrix::str() const {
  std::ostringstream os;
  os << "(" << a_ << " " << b_ << "; " << c_ << " " << d_ << ")";
  return os.str();
}

SymplecticClass classify(const ResidueMatrix& m, long dbar) {
  if (m.modulus() != dbar) throw std::invalid_argument("classify: modulus differs from dbar");
  if (m.det() == mod(1, dbar)) return SymplecticClass::symplectic;
  if (m.det() == mod(-1, dbar)) return SymplecticClass::antisymplectic;
  return SymplecticClass::neither;
}

const char* to_string(SymplecticClass c) {
  switch (c) {
    case SymplecticClass::symplectic:
      return "symplectic";
    case SymplecticClass::antisymplectic:
      return "antisymplectic";
    default:
      return "neither";
  }
}

ResidueMatrix invert(const ResidueMatrix& m) { return m.inverse(); }

bool is_prime_matrix(const ResidueMatrix& f, long dbar) { return gcd(f.beta(), dbar) == 1; }

std::pair<ResidueMatrix, ResidueMatrix> prime_decompose(const ResidueMatrix& f, long dbar) {
  if (is_prime_matrix(f, dbar)) throw std::invalid_argument("prime_decompose called on a prime matrix");
  const ResidueMatrix s(dbar, 0, -1, 1, 0);
  for (long c = 0; c < dbar; ++c) {
    ResidueMatrix f2 = c == 0 ? s : ResidueMatrix(dbar, 1, c, 0, 1) * s;
    ResidueMatrix f1 = f * f2.inverse();
    if (is_prime_matrix(f1, dbar)) return {f1, f2};
  }
  throw DecompositionFailed("no prime factorization found for " + f.str());
}

ResidueMatrix f_z(long d) {
  long n = dbar_of(d);
  return {n, 0, d - 1, d + 1, d - 1};
}

ResidueMatrix f_a(long d) {
  if (d % 9 != 3) throw std::invalid_argument("F_a is defined only for d = 3 mod 9");
  long k = (d - 3) / 9;
  long n = dbar_of(d);
  return {n, 1, d + 3, d + 3 * k, d - 2};
}

ResidueMatrix j_matrix(long n) { return {n, 1, 0, 0, -1}; }

bool MatrixGroup::contains(const ResidueMatrix& m) const {
  return std::binary_search(elements.begin(), elements.end(), m);
}

bool MatrixGroup::is_abelian() const {
  const auto& gens = generators.empty() ? elements : generators;
  for (const auto& a : gens)
    for (const auto& b : gens)
      if (a * b != b * a) return false;
  return true;
}

MatrixGroup generate(long n, const std::vector<ResidueMatrix>& generators, std::size_t cap) {
  MatrixGroup g;
  g.modulus = n;
  g.generators = generators;
  for (const auto& x : generators) {
    if (x.modulus() != n) throw std::invalid_argument("generate: modulus mismatch");
    if (!x.is_invertible()) throw NonInvertible("generator " + x.str());
  }
  std::unordered_set<std::uint64_t> seen;
  std::vector<ResidueMatrix> frontier{ResidueMatrix::identity(n)};
  seen.insert(frontier.front().code());
  g.elements.push_back(frontier.front());
  while (!frontier.empty()) {
    std::vector<ResidueMatrix> next;
    for (const auto& x : frontier)
      for (const auto& s : generators) {
        ResidueMatrix y = x * s;
        if (seen.insert(y.code()).second) {
          if (seen.size() > cap) throw TooLarge("closure exceeds cap " + std::to_string(cap));
          g.elements.push_back(y);
          next.push_back(y);
        }
      }
    frontier = std::move(next);
  }
  std::sort(g.elements.begin(), g.elements.end());
  return g;
}

MatrixGroup group_from_elements(long n, std::vector<ResidueMatrix> elements) {
  MatrixGroup g;
  g.modulus = n;
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  g.elements = std::move(elements);
  return g;
}

namespace {

const std::vector<ResidueMatrix>& gens_or_elements(const MatrixGroup& h) {
  return h.generators.empty() ? h.elements : h.generators;
}

}  // namespace

MatrixGroup centralizer(const MatrixGroup& h, long n, std::size_t cap, int threads) {
  if (threads <= 0) threads = default_threads();
  // X = (x y; z w) commutes with (a b; c e) iff, with u = x - w,
  //   c y = b z,  b u + (e - a) y = 0,  -c u + (a - e) z = 0   (mod n).
  struct Coef {
    long a, b, c, e;
  };
  std::vector<Coef> cs;
  for (const auto& m : gens_or_elements(h)) cs.push_back({m.alpha(), m.beta(), m.gamma(), m.delta()});
  std::vector<std::vector<ResidueMatrix>> parts(std::max(1, threads));
  std::atomic<std::size_t> total{0};
  std::atomic<bool> overflow{false};
  parallel_chunks(static_cast<std::size_t>(n), threads, [&](std::size_t b0, std::size_t e0, int w) {
    for (long y = static_cast<long>(b0); y < static_cast<long>(e0); ++y)
      for (long z = 0; z < n; ++z) {
        bool ok = true;
        for (const auto& c : cs)
          if (mod(c.c * y - c.b * z, n) != 0) {
            ok = false;
            break;
          }
        if (!ok) continue;
        for (long u = 0; u < n; ++u) {
          bool good = true;
          for (const auto& c : cs)
            if (mod(c.b * u + (c.e - c.a) * y, n) != 0 || mod(-c.c * u + (c.a - c.e) * z, n) != 0) {
              good = false;
              break;
            }
          if (!good) continue;
          for (long x = 0; x < n; ++x) {
            ResidueMatrix m(n, x, y, z, x - u);
            if (!m.is_invertible()) continue;
            parts[w].push_back(m);
            if (++total > cap) {
              overflow = true;
              return;
            }
          }
        }
      }
  });
  if (overflow) throw TooLarge("centralizer exceeds cap " + std::to_string(cap));
  std::vector<ResidueMatrix> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return group_from_elements(n, std::move(all));
}

MatrixGroup normalizer(const MatrixGroup& h, long n, std::size_t cap, int threads) {
  if (threads <= 0) threads = default_threads();
  std::unordered_set<std::uint64_t> members;
  for (const auto& m : h.elements) members.insert(m.code());
  const auto& gens = gens_or_elements(h);
  std::vector<std::vector<ResidueMatrix>> parts(std::max(1, threads));
  std::atomic<std::size_t> total{0};
  std::atomic<bool> overflow{false};
  parallel_chunks(static_cast<std::size_t>(n), threads, [&](std::size_t b0, std::size_t e0, int w) {
    for (long a = static_cast<long>(b0); a < static_cast<long>(e0); ++a)
      for (long b = 0; b < n; ++b)
        for (long c = 0; c < n; ++c)
          for (long d = 0; d < n; ++d) {
            long det = mod(a * d - b * c, n);
            if (!is_unit(det, n)) continue;
            ResidueMatrix g(n, a, b, c, d);
            ResidueMatrix gi = g.inverse();
            bool ok = true;
            for (const auto& x : gens)
              if (!members.count((g * x * gi).code())) {
                ok = false;
                break;
              }
            if (!ok) continue;
            parts[w].push_back(g);
            if (++total > cap) {
              overflow = true;
              return;
            }
          }
  });
  if (overflow) throw TooLarge("normalizer exceeds cap " + std::to_string(cap));
  std::vector<ResidueMatrix> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return group_from_elements(n, std::move(all));
}

std::vector<ResidueMatrix> gl2(long n) {
  std::vector<ResidueMatrix> out;
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b)
      for (long c = 0; c < n; ++c)
        for (long d = 0; d < n; ++d)
          if (is_unit(a * d - b * c, n)) out.emplace_back(n, a, b, c, d);
  return out;
}

std::vector<ResidueMatrix> esl2(long n) {
  std::vector<ResidueMatrix> out;
  long one = mod(1, n), minus = mod(-1, n);
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b)
      for (long c = 0; c < n; ++c)
        for (long d = 0; d < n; ++d) {
          long det = mod(a * d - b * c, n);
          if (det == one || det == minus) out.emplace_back(n, a, b, c, d);
        }
  return out;
}

std::size_t gl2_order(long n) {
  // n^4 prod_p (1 - 1/p)(1 - 1/p^2)
  std::size_t order = static_cast<std::size_t>(n) * n * n * n;
  auto account = [&order](long p) {
    order = order / p * (p - 1);
    order = order / (p * p) * (p * p - 1);
  };
  long m = n;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    while (m % p == 0) m /= p;
    account(p);
  }
  if (m > 1) account(m);
  return order;
}

long AbelianInvariants::order() const {
  long o = 1;
  for (long f : factors) o *= f;
  return o;
}

std::string AbelianInvariants::str() const {
  if (factors.empty()) return "Z1";
  std::string s;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) s += " + ";
    s += "Z" + std::to_string(factors[i]);
  }
  return s;
}

AbelianInvariants abelian_invariants(const std::vector<std::vector<int>>& table, int identity) {
  const int k = static_cast<int>(table.size());
  auto power = [&](int x, long e) {
    int out = identity, base = x;
    while (e > 0) {
      if (e & 1) out = table[out][base];
      base = table[base][base];
      e >>= 1;
    }
    return out;
  };
  // Exponents of each primary component from the counts #{x : x^(p^e) = 1}.
  std::map<long, std::vector<int>> primary;  // p -> exponents, descending
  long m = k;
  for (long p = 2; m > 1; ++p) {  // k is small; plain trial division
    if (m % p != 0) continue;
    int top = 0;
    while (m % p == 0) {
      m /= p;
      ++top;
    }
    std::vector<int> logs(top + 2, 0);
    long pe = 1;
    for (int e = 1; e <= top + 1; ++e) {
      pe *= p;
      long count = 0;
      for (int x = 0; x < k; ++x)
        if (power(x, pe) == identity) ++count;
      int lg = 0;
      while (count > 1) {
        count /= p;
        ++lg;
      }
      logs[e] = lg;
    }
    std::vector<int> ge(top + 2, 0);  // number of factors with exponent >= e
    for (int e = 1; e <= top + 1; ++e) ge[e] = logs[e] - logs[e - 1];
    std::vector<int> exps;
    for (int e = 1; e <= top + 1; ++e) {
      int exactly = ge[e] - (e + 1 <= top + 1 ? ge[e + 1] : 0);
      for (int i = 0; i < exactly; ++i) exps.push_back(e);
    }
    std::sort(exps.rbegin(), exps.rend());
    primary[p] = exps;
  }
  size_t width = 0;
  for (const auto& [p, exps] : primary) width = std::max(width, exps.size());
  std::vector<long> factors(width, 1);
  for (const auto& [p, exps] : primary)
    for (size_t i = 0; i < exps.size(); ++i)
      for (int e = 0; e < exps[i]; ++e) factors[i] *= p;
  std::sort(factors.begin(), factors.end());
  AbelianInvariants out;
  for (long f : factors)
    if (f > 1) out.factors.push_back(f);
  return out;
}

int CosetTable::coset_of(const ResidueMatrix& m) const {
  auto it = std::lower_bound(codes.begin(), codes.end(), m.code());
  if (it == codes.end() || *it != m.code()) return -1;
  return coset_index[it - codes.begin()];
}

CosetTable coset_table(const MatrixGroup& g, const MatrixGroup& n) {
  for (const auto& x : n.elements)
    if (!g.contains(x)) throw NotNormal(x.str() + " is not in the ambient group");
  const auto& gg = gens_or_elements(g);
  const auto& ng = gens_or_elements(n);
  for (const auto& x : gg) {
    ResidueMatrix xi = x.inverse();
    for (const auto& y : ng)
      if (!n.contains(x * y * xi)) throw NotNormal("conjugate of " + y.str() + " by " + x.str() + " leaves the subgroup");
  }
  CosetTable t;
  t.codes.reserve(g.order());
  for (const auto& x : g.elements) t.codes.push_back(x.code());
  t.coset_index.assign(g.order(), -1);
  for (size_t i = 0; i < g.order(); ++i) {
    if (t.coset_index[i] >= 0) continue;
    int id = static_cast<int>(t.representatives.size());
    t.representatives.push_back(g.elements[i]);
    for (const auto& y : n.elements) {
      auto it = std::lower_bound(t.codes.begin(), t.codes.end(), (g.elements[i] * y).code());
      t.coset_index[it - t.codes.begin()] = id;
    }
  }
  const int k = static_cast<int>(t.representatives.size());
  t.product.assign(k, std::vector<int>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) t.product[i][j] = t.coset_of(t.representatives[i] * t.representatives[j]);
  t.identity = t.coset_of(ResidueMatrix::identity(g.modulus));
  return t;
}

AbelianInvariants quotient_invariants(const MatrixGroup& g, const MatrixGroup& n) {
  CosetTable t = coset_table(g, n);
  const size_t k = t.product.size();
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 1; j < k; ++j)
      if (t.product[i][j] != t.product[j][i]) throw NotAbelian("cosets of " + t.representatives[i].str() + " and " + t.representatives[j].str() + " do not commute");
  return abelian_invariants(t.product, t.identity);
}

long squarefree_part(long m) {
  if (m < 1) throw std::invalid_argument("squarefree_part needs m >= 1");
  long out = 1;
  for (long p = 2; p * p <= m; ++p) {
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e % 2) out *= p;
  }
  return out * m;
}

}  // namespace sicg
