#include "sicg/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>

#include "sicg/clifford.hpp"
#include "sicg/errors.hpp"
#include "sicg/parallel.hpp"
#include "sicg/weyl_heisenberg.hpp"

namespace sicg {

using cd = std::complex<double>;
using DVec = std::vector<cd>;

const char* to_string(SearchSymmetry s) {
  switch (s) {
    case SearchSymmetry::fz: return "z";
    case SearchSymmetry::fa: return "a";
    case SearchSymmetry::none: return "none";
  }
  return "?";
}

namespace {

std::vector<cd> tau_table(long d) {
  std::vector<cd> t(static_cast<size_t>(2 * d));
  for (long j = 0; j < 2 * d; ++j) t[static_cast<size_t>(j)] = std::polar(1.0, std::numbers::pi * static_cast<double>(mod(j * (d + 1), 2 * d)) / static_cast<double>(d));
  return t;
}

}  // namespace

double frame_potential(const DVec& psi, long d, DVec* gradient) {
  static thread_local long cached_d = -1;
  static thread_local std::vector<cd> tau;
  if (cached_d != d) {
    tau = tau_table(d);
    cached_d = d;
  }
  const size_t n = static_cast<size_t>(d);
  double norm2 = 0;
  for (const auto& z : psi) norm2 += std::norm(z);
  double f = 0;
  DVec gf(n, 0.0), dp(n);
  for (long p1 = 0; p1 < d; ++p1)
    for (long p2 = 0; p2 < d; ++p2) {
      if (p1 == 0 && p2 == 0) continue;
      cd chi = 0;
      for (long s = 0; s < d; ++s) {
        cd v = tau[static_cast<size_t>(mod(p1 * p2 + 2 * s * p2, 2 * d))] * psi[static_cast<size_t>(s)];
        dp[static_cast<size_t>((s + p1) % d)] = v;
      }
      for (size_t r = 0; r < n; ++r) chi += std::conj(psi[r]) * dp[r];
      double a2 = std::norm(chi);
      f += a2 * a2;
      if (gradient) {
        cd w = 8.0 * a2 * std::conj(chi);
        for (size_t r = 0; r < n; ++r) gf[r] += w * dp[r];
      }
    }
  const double n4 = norm2 * norm2 * norm2 * norm2;
  const double h = f / n4;
  if (gradient) {
    gradient->assign(n, 0.0);
    const double n5 = n4 * norm2;
    for (size_t r = 0; r < n; ++r) (*gradient)[r] = gf[r] / n4 - 8.0 * f * psi[r] / n5;
  }
  return h;
}

Real frame_potential(const CVector& psi, long d) {
  const RootTable& t = roots(d);
  Real norm2 = 0;
  for (const auto& z : psi) norm2 += norm(z);
  Real f = 0;
  for (long p1 = 0; p1 < d; ++p1)
    for (long p2 = 0; p2 < d; ++p2) {
      if (p1 == 0 && p2 == 0) continue;
      Complex chi;
      for (long s = 0; s < d; ++s)
        chi += conj(psi[static_cast<size_t>((s + p1) % d)]) * t.tau_pow(displacement_exponent({p1, p2}, s, d)) * psi[static_cast<size_t>(s)];
      Real a2 = norm(chi);
      f += a2 * a2;
    }
  return f / (norm2 * norm2 * norm2 * norm2);
}

ResidueMatrix symmetry_matrix(long d, SearchSymmetry s) {
  switch (s) {
    case SearchSymmetry::fz: return f_z(d);
    case SearchSymmetry::fa:
      if (d % 9 != 3) throw std::invalid_argument("F_a symmetry requires d = 9k + 3");
      return f_a(d);
    case SearchSymmetry::none: return ResidueMatrix::identity(dbar_of(d));
  }
  return ResidueMatrix::identity(dbar_of(d));
}

namespace {

// P_b = (1/3) sum_j (omega^-b U / mu)^j
CMatrix eigen_projector(const ResidueMatrix& f, long d, int branch) {
  if (branch < 0 || branch > 2) throw std::invalid_argument("branch must be 0, 1 or 2");
  CMatrix u = symplectic_unitary(f, d);
  CMatrix u2 = u * u;
  CMatrix u3 = u2 * u;
  const int n = static_cast<int>(d);
  Complex c = u3(0, 0);
  if (max_abs_diff(u3, CMatrix::identity(n) * c) > structural_tolerance())
    throw std::invalid_argument("U_F is not of order 3 up to phase");
  Complex mu = cbrt(c);
  Complex step = exp_i_pi(-2 * branch, 3) / mu;
  CMatrix p = CMatrix::identity(n);
  p += u * step;
  p += u2 * (step * step);
  p *= Complex(Real(1) / 3);
  return p;
}

}  // namespace

std::vector<CVector> symmetric_basis(const ResidueMatrix& f, long d, int branch) {
  CMatrix p = eigen_projector(f, d, branch);
  const int n = static_cast<int>(d);
  std::vector<CVector> basis;
  const Real cut = ten_to_minus(10);
  for (int j = 0; j < n; ++j) {
    CVector v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = p(i, j);
    for (const auto& b : basis) {
      Complex c = inner(b, v);
      for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] -= c * b[static_cast<size_t>(i)];
    }
    Real nv = boost::multiprecision::sqrt(inner(v, v).re);
    if (nv < cut) continue;
    for (auto& z : v) z = z * (Real(1) / nv);
    basis.push_back(std::move(v));
  }
  return basis;
}

CVector project_symmetric(const CVector& psi, const ResidueMatrix& f, long d, int branch) {
  CMatrix p = eigen_projector(f, d, branch);
  CVector v = mat_vec(p, psi);
  Real nv = boost::multiprecision::sqrt(inner(v, v).re);
  Real n0 = boost::multiprecision::sqrt(inner(psi, psi).re);
  if (nv <= structural_tolerance() * n0) throw ZeroProjection("branch " + std::to_string(branch) + " eigenspace is orthogonal to the input");
  for (auto& z : v) z = z * (Real(1) / nv);
  return v;
}

CVector polish(const CVector& psi0, long d, int max_iterations) {
  const RootTable& t = roots(d);
  const size_t n = static_cast<size_t>(d);
  const size_t vars = 2 * n;
  const Real target = Real(1) / (d + 1);
  const unsigned digits = working_digits();
  const Real done = ten_to_minus(static_cast<int>(digits) + 3);
  const Real accept = ten_to_minus(static_cast<int>(digits) - 10);

  struct Eval {
    std::vector<Real> r;
    std::vector<std::vector<Real>> jac;  // rows per residual
    Real max_abs = 0;
    Real sum_sq = 0;
  };
  auto evaluate = [&](const CVector& psi, bool with_jacobian) {
    Eval e;
    Real norm2 = 0;
    for (const auto& z : psi) norm2 += norm(z);
    const Real inv_n2 = Real(1) / (norm2 * norm2);
    const Real inv_n3 = inv_n2 / norm2;
    CVector v(n), w(n);
    for (long p1 = 0; p1 < d; ++p1)
      for (long p2 = 0; p2 < d; ++p2) {
        if (p1 == 0 && p2 == 0) continue;
        for (long s = 0; s < d; ++s) {
          const Complex& ph = t.tau_pow(displacement_exponent({p1, p2}, s, d));
          v[static_cast<size_t>((s + p1) % d)] = ph * psi[static_cast<size_t>(s)];
          w[static_cast<size_t>(s)] = conj(ph) * psi[static_cast<size_t>((s + p1) % d)];  // D_p^dagger psi
        }
        Complex chi = inner(psi, v);
        Real a2 = norm(chi);
        Real r = a2 * inv_n2 - target;
        e.max_abs = std::max(e.max_abs, Real(boost::multiprecision::abs(r)));
        e.sum_sq += r * r;
        e.r.push_back(r);
        if (!with_jacobian) continue;
        std::vector<Real> row(vars);
        Complex cc = conj(chi);
        for (size_t j = 0; j < n; ++j) {
          Complex g = (cc * v[j] + chi * w[j]) * inv_n2 - psi[j] * (2 * a2 * inv_n3);
          row[j] = 2 * g.re;
          row[n + j] = 2 * g.im;
        }
        e.jac.push_back(std::move(row));
      }
    return e;
  };

  CVector psi = psi0;
  Eval cur = evaluate(psi, true);
  Real lambda = ten_to_minus(6);
  for (int it = 0; it < max_iterations && cur.max_abs > done; ++it) {
    std::vector<Real> jtj(vars * vars), jtr(vars);
    for (size_t k = 0; k < cur.r.size(); ++k) {
      const auto& row = cur.jac[k];
      for (size_t a = 0; a < vars; ++a) {
        if (row[a] == 0) continue;
        jtr[a] -= row[a] * cur.r[k];
        for (size_t b = a; b < vars; ++b) jtj[a * vars + b] += row[a] * row[b];
      }
    }
    for (size_t a = 0; a < vars; ++a)
      for (size_t b = 0; b < a; ++b) jtj[a * vars + b] = jtj[b * vars + a];
    Real scale = 0;
    for (size_t a = 0; a < vars; ++a) scale = std::max(scale, jtj[a * vars + a]);
    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      std::vector<Real> a = jtj;
      for (size_t k = 0; k < vars; ++k) a[k * vars + k] += lambda * scale;
      std::vector<Real> delta = solve_linear(a, jtr);
      CVector trial = psi;
      for (size_t j = 0; j < n; ++j) trial[j] += Complex(delta[j], delta[n + j]);
      Eval next = evaluate(trial, false);
      if (next.sum_sq < cur.sum_sq) {
        psi = std::move(trial);
        cur = evaluate(psi, true);
        lambda = std::max(Real(lambda / 10), ten_to_minus(static_cast<int>(digits) + 5));
        improved = true;
      } else {
        lambda *= 10;
      }
    }
    if (!improved) break;
  }
  if (cur.max_abs > accept)
    throw NotConverged("polish stalled at max residual " + to_fixed(cur.max_abs, 3 + static_cast<int>(digits)), cur.max_abs.convert_to<double>());
  Real nrm = boost::multiprecision::sqrt(inner(psi, psi).re);
  for (auto& z : psi) z = z * (Real(1) / nrm);
  return psi;
}

namespace {

struct Restart {
  double value = std::numeric_limits<double>::infinity();
  DVec psi;
  int branch = 0;
  int restart = 0;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// L-BFGS with backtracking (Armijo) line search on x = (Re c, Im c), psi = B c.
Restart run_restart(const std::vector<DVec>& basis, long d, std::mt19937_64& rng, int max_iterations, double target) {
  const size_t m = basis.size();
  const size_t n = static_cast<size_t>(d);
  auto to_psi = [&](const std::vector<double>& x) {
    DVec psi(n, 0.0);
    for (size_t k = 0; k < m; ++k) {
      cd c(x[k], x[m + k]);
      for (size_t j = 0; j < n; ++j) psi[j] += c * basis[k][j];
    }
    return psi;
  };
  auto eval = [&](const std::vector<double>& x, std::vector<double>& g) {
    DVec gp;
    double h = frame_potential(to_psi(x), d, &gp);
    g.assign(2 * m, 0.0);
    for (size_t k = 0; k < m; ++k) {
      cd s = 0;
      for (size_t j = 0; j < n; ++j) s += std::conj(basis[k][j]) * gp[j];
      g[k] = s.real();
      g[m + k] = s.imag();
    }
    return h;
  };

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(2 * m);
  for (auto& v : x) v = gauss(rng);
  double nx = std::sqrt(dot(x, x));
  for (auto& v : x) v /= nx;

  std::vector<double> g, gn, xn(2 * m), dir(2 * m);
  double h = eval(x, g);
  std::deque<std::pair<std::vector<double>, std::vector<double>>> mem;
  const size_t memory = 12;
  int stalled = 0;  // consecutive iterations with negligible decrease
  for (int it = 0; it < max_iterations && stalled < 25; ++it) {
    if (h - target < 1e-15 || std::sqrt(dot(g, g)) < 1e-13) break;
    // Two-loop recursion.
    dir = g;
    std::vector<double> alpha(mem.size());
    for (size_t i = mem.size(); i-- > 0;) {
      alpha[i] = dot(mem[i].first, dir) / dot(mem[i].second, mem[i].first);
      for (size_t k = 0; k < dir.size(); ++k) dir[k] -= alpha[i] * mem[i].second[k];
    }
    if (!mem.empty()) {
      double gamma = dot(mem.back().first, mem.back().second) / dot(mem.back().second, mem.back().second);
      for (auto& v : dir) v *= gamma;
    } else {
      double gn0 = std::sqrt(dot(g, g));
      for (auto& v : dir) v /= std::max(gn0, 1e-300) * 10;
    }
    for (size_t i = 0; i < mem.size(); ++i) {
      double beta = dot(mem[i].second, dir) / dot(mem[i].second, mem[i].first);
      for (size_t k = 0; k < dir.size(); ++k) dir[k] += (alpha[i] - beta) * mem[i].first[k];
    }
    for (auto& v : dir) v = -v;
    double slope = dot(g, dir);
    if (slope >= 0) {
      mem.clear();
      for (size_t k = 0; k < dir.size(); ++k) dir[k] = -g[k];
      slope = dot(g, dir);
    }
    double step = 1.0, hn = h;
    bool ok = false;
    for (int ls = 0; ls < 50; ++ls) {
      for (size_t k = 0; k < x.size(); ++k) xn[k] = x[k] + step * dir[k];
      hn = eval(xn, gn);
      if (hn <= h + 1e-4 * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    std::vector<double> s(x.size()), y(x.size());
    for (size_t k = 0; k < x.size(); ++k) {
      s[k] = xn[k] - x[k];
      y[k] = gn[k] - g[k];
    }
    if (dot(s, y) > 1e-18 * std::sqrt(dot(s, s) * dot(y, y))) {
      mem.emplace_back(std::move(s), std::move(y));
      if (mem.size() > memory) mem.pop_front();
    }
    stalled = (h - hn < 1e-15 * std::max(1.0, h)) ? stalled + 1 : 0;
    x.swap(xn);
    g.swap(gn);
    h = hn;
    // h is scale invariant; keep |x| near 1 so step sizes stay meaningful.
    double nrm = std::sqrt(dot(x, x));
    if (nrm > 4 || nrm < 0.25) {
      for (auto& v : x) v /= nrm;
      h = eval(x, g);
      mem.clear();
    }
  }
  Restart r;
  r.value = h;
  r.psi = to_psi(x);
  double nrm = 0;
  for (const auto& z : r.psi) nrm += std::norm(z);
  for (auto& z : r.psi) z /= std::sqrt(nrm);
  return r;
}

std::vector<Restart> coarse_stage(const SearchConfig& cfg, int branch) {
  const long d = cfg.d;
  const double target = static_cast<double>(d - 1) / static_cast<double>(d + 1);
  std::vector<DVec> basis;
  if (cfg.symmetry == SearchSymmetry::none) {
    for (long j = 0; j < d; ++j) {
      DVec e(static_cast<size_t>(d), 0.0);
      e[static_cast<size_t>(j)] = 1.0;
      basis.push_back(e);
    }
  } else {
    for (const auto& v : symmetric_basis(symmetry_matrix(d, cfg.symmetry), d, branch)) {
      DVec e;
      for (const auto& z : v) e.push_back(to_double(z));
      basis.push_back(e);
    }
  }
  std::vector<Restart> out(static_cast<size_t>(cfg.restarts));
  if (basis.empty()) return {};
  const int threads = cfg.threads > 0 ? cfg.threads : default_threads();
  parallel_chunks(out.size(), threads, [&](size_t b, size_t e, int) {
    for (size_t i = b; i < e; ++i) {
      std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(branch), static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(d)};
      std::mt19937_64 rng(seq);
      out[i] = run_restart(basis, d, rng, cfg.max_iterations, target);
      out[i].branch = branch;
      out[i].restart = static_cast<int>(i);
    }
  });
  return out;
}

std::vector<int> branches(const SearchConfig& cfg) {
  if (cfg.symmetry == SearchSymmetry::none) return {0};
  if (cfg.branch >= 0) return {cfg.branch};
  return {0, 1, 2};
}

SearchResult finish(const SearchConfig& cfg, const Restart& r) {
  CVector start;
  for (const auto& z : r.psi) start.push_back(from_double(z));
  CVector psi = polish(start, cfg.d);
  SearchResult out;
  out.fiducial = FiducialProjector::from_vector(psi, Provenance::searched);
  out.coarse_value = r.value;
  out.branch = r.branch;
  out.restart = r.restart;
  SicReport rep = verify_sic(out.fiducial, ten_to_minus(static_cast<int>(working_digits()) - 10));
  if (!rep.pass) throw NotConverged("polished candidate fails verification", rep.max_deviation.convert_to<double>());
  out.max_deviation = rep.max_deviation;
  return out;
}

// Re-rounds a result computed at a higher polish precision to the caller's precision.
SearchResult rescope(const SearchResult& r, unsigned digits) {
  SearchResult out = r;
  CVector psi;
  for (const auto& z : r.fiducial.vector()) psi.emplace_back(parse_real(to_fixed(z.re, static_cast<int>(digits) + 12)), parse_real(to_fixed(z.im, static_cast<int>(digits) + 12)));
  out.fiducial = FiducialProjector::from_vector(psi, Provenance::searched);
  out.max_deviation = parse_real(to_fixed(r.max_deviation, static_cast<int>(digits) + 12));
  return out;
}

template <class Body>
SearchResult with_polish_scope(const SearchConfig& cfg, Body body) {
  if (cfg.d < 2) throw std::invalid_argument("d must be >= 2");
  const unsigned caller = working_digits();
  if (cfg.polish_digits == 0 || cfg.polish_digits == caller) return body();
  SearchResult r;
  {
    PrecisionScope ps(cfg.polish_digits);
    r = body();
  }
  return rescope(r, caller);
}

}  // namespace

SearchResult find_fiducial(const SearchConfig& cfg) {
  return with_polish_scope(cfg, [&] {
    const double target = static_cast<double>(cfg.d - 1) / static_cast<double>(cfg.d + 1);
    Restart best;
    for (int b : branches(cfg))
      for (const auto& r : coarse_stage(cfg, b))
        if (r.value < best.value) best = r;  // strict: earliest wins ties
    if (best.psi.empty() || best.value - target > cfg.coarse_tolerance)
      throw NotConverged("no restart reached the frame-potential minimum", best.value - target);
    return finish(cfg, best);
  });
}

SearchResult find_fiducial(const SearchConfig& cfg, const std::function<bool(const FiducialProjector&)>& accept) {
  return with_polish_scope(cfg, [&] {
    const double target = static_cast<double>(cfg.d - 1) / static_cast<double>(cfg.d + 1);
    double best_gap = std::numeric_limits<double>::infinity();
    for (int b : branches(cfg)) {
      for (const auto& r : coarse_stage(cfg, b)) {
        best_gap = std::min(best_gap, r.value - target);
        if (r.value - target > cfg.coarse_tolerance) continue;
        SearchResult out;
        try {
          out = finish(cfg, r);
        } catch (const NotConverged&) {
          continue;
        }
        if (accept(out.fiducial)) return out;
      }
    }
    throw NotConverged("no converged restart satisfied the acceptance predicate", best_gap);
  });
}

}  // namespace sicg
