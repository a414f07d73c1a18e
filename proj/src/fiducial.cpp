#include "sicg/fiducial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "sicg/errors.hpp"
#include "sicg/parallel.hpp"
#include "sicg/weyl_heisenberg.hpp"

namespace sicg {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::searched: return "searched";
    case Provenance::file: return "file";
    case Provenance::transformed: return "transformed";
    case Provenance::constructed: return "constructed";
  }
  return "?";
}

const char* to_string(OrbitType t) {
  switch (t) {
    case OrbitType::z: return "z";
    case OrbitType::a: return "a";
    case OrbitType::neither: return "neither";
  }
  return "?";
}

FiducialProjector FiducialProjector::from_vector(const CVector& psi, Provenance provenance, std::string orbit) {
  const int d = static_cast<int>(psi.size());
  Real n2 = 0;
  for (const auto& z : psi) n2 += norm(z);
  if (n2 == 0) throw std::invalid_argument("zero vector");
  FiducialProjector out;
  out.d = d;
  out.pi = CMatrix(d, d);
  out.provenance = provenance;
  out.orbit = std::move(orbit);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) out.pi(r, s) = psi[static_cast<size_t>(r)] * conj(psi[static_cast<size_t>(s)]) * (Real(1) / n2);
  return out;
}

CVector FiducialProjector::vector() const {
  const int n = static_cast<int>(d);
  int j = 0;
  for (int i = 1; i < n; ++i)
    if (pi(i, i).re > pi(j, j).re) j = i;
  Real scale = Real(1) / boost::multiprecision::sqrt(pi(j, j).re);
  CVector psi(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) psi[static_cast<size_t>(i)] = pi(i, j) * scale;
  return psi;
}

SicReport verify_sic(const FiducialProjector& fp, const Real& tol) {
  const long d = fp.d;
  const CMatrix& pi = fp.pi;
  const Real limit = tol * 10;
  if (max_abs_diff(pi, pi.adjoint()) > limit) throw NotAProjector("not Hermitian");
  if (max_abs_diff(pi * pi, pi) > limit) throw NotAProjector("not idempotent");
  if (abs(pi.trace() - Complex(1)) > limit) throw NotAProjector("trace differs from 1");

  SicReport rep;
  rep.max_deviation = 0;
  const Real target = Real(1) / (d + 1);
  for (long p1 = 0; p1 < d; ++p1)
    for (long p2 = 0; p2 < d; ++p2) {
      if (p1 == 0 && p2 == 0) continue;
      Real dev = boost::multiprecision::abs(norm(trace_with_displacement(pi, {p1, p2})) - target);
      if (dev > rep.max_deviation) {
        rep.max_deviation = dev;
        rep.worst = {p1, p2};
      }
    }
  // (D_p Pi D_p^dagger)_{ab} = Pi_{a-p1, b-p1} tau^{2 p2 (a-b)}
  const RootTable& t = roots(d);
  CMatrix sum(static_cast<int>(d), static_cast<int>(d));
  for (long p1 = 0; p1 < d; ++p1)
    for (long a = 0; a < d; ++a)
      for (long b = 0; b < d; ++b) {
        const Complex& v = pi(static_cast<int>(mod(a - p1, d)), static_cast<int>(mod(b - p1, d)));
        Complex phase_sum;
        for (long p2 = 0; p2 < d; ++p2) phase_sum += t.tau_pow(2 * p2 * (a - b));
        sum(static_cast<int>(a), static_cast<int>(b)) += v * phase_sum;
      }
  CMatrix target_frame = CMatrix::identity(static_cast<int>(d)) * Complex(static_cast<int>(d));
  rep.frame_deviation = max_abs_diff(sum, target_frame);
  rep.pass = rep.max_deviation < tol && rep.frame_deviation < tol;
  return rep;
}

OverlapTable::OverlapTable(long d, std::vector<Complex> values) : d_(d), n_(dbar_of(d)), v_(std::move(values)) {
  if (v_.size() != static_cast<size_t>(n_ * n_)) throw std::invalid_argument("overlap table size");
}

std::vector<std::complex<double>> OverlapTable::to_double() const {
  std::vector<std::complex<double>> out;
  out.reserve(v_.size());
  for (const auto& z : v_) out.push_back(sicg::to_double(z));
  return out;
}

OverlapTable overlaps(const FiducialProjector& fp) {
  const long n = dbar_of(fp.d);
  std::vector<Complex> v(static_cast<size_t>(n * n));
  for (long p1 = 0; p1 < n; ++p1)
    for (long p2 = 0; p2 < n; ++p2) v[static_cast<size_t>(p1 * n + p2)] = trace_with_displacement(fp.pi, {p1, p2});
  return OverlapTable(fp.d, std::move(v));
}

namespace {

bool is_antisymplectic(const ResidueMatrix& f) { return f.det() == mod(-1, f.modulus()) && f.det() != 1; }

// j with z ~ e^{2 pi i j / d}, or -1.
template <class Fn>
long root_index(double arg_over_2pi, long d, Fn&& close) {
  long j = mod(std::lround(arg_over_2pi * static_cast<double>(d)), d);
  return close(j) ? j : -1;
}

struct DoubleStabilizerTest {
  long d, n;
  std::vector<std::complex<double>> chi;
  std::vector<std::complex<double>> omega;  // e^{2 pi i j / d}
  double tol;

  const std::complex<double>& at(long p1, long p2) const { return chi[static_cast<size_t>(mod(p1, n) * n + mod(p2, n))]; }

  // Candidate q for F, or nullopt.
  std::optional<Pair> operator()(const ResidueMatrix& f) const {
    const ResidueMatrix fi = f.inverse();
    const bool anti = is_antisymplectic(f);
    auto image = [&](long p1, long p2) {
      Pair q = fi.apply({p1, p2});
      std::complex<double> v = at(q[0], q[1]);
      return anti ? std::conj(v) : v;
    };
    // chi_p = omega^{<p,q>} image(p); <e1,q> = -q2, <e2,q> = q1.
    std::complex<double> r1 = at(1, 0) / image(1, 0), r2 = at(0, 1) / image(0, 1);
    auto idx = [&](std::complex<double> r) {
      double a = std::arg(r) / (2 * std::numbers::pi);
      return root_index(a, d, [&](long j) { return std::abs(r - omega[static_cast<size_t>(j)]) < tol; });
    };
    long j1 = idx(r1), j2 = idx(r2);
    if (j1 < 0 || j2 < 0) return std::nullopt;
    Pair q{j2, mod(-j1, d)};
    for (long p1 = 0; p1 < d; ++p1)
      for (long p2 = 0; p2 < d; ++p2) {
        long s = mod(p2 * q[0] - p1 * q[1], d);
        if (std::abs(at(p1, p2) - omega[static_cast<size_t>(s)] * image(p1, p2)) > tol) return std::nullopt;
      }
    return q;
  }
};

bool kernel_displacement(const Pair& q, long d) {
  auto ok = [&](long x) { return x == 0 || (d % 2 == 0 && x == d / 2); };
  return ok(mod(q[0], d)) && ok(mod(q[1], d));
}

}  // namespace

std::optional<Pair> stabilizing_displacement(const OverlapTable& chi, const ResidueMatrix& f, const Real& tol) {
  const long d = chi.dimension(), n = chi.dbar();
  const RootTable& t = roots(d);
  const ResidueMatrix fi = f.inverse();
  const bool anti = is_antisymplectic(f);
  auto image = [&](const Pair& p) {
    const Complex& v = chi.at(fi.apply(p));
    return anti ? conj(v) : v;
  };
  auto index_of = [&](const Complex& r) -> long {
    // omega^j = tau^{2j}
    double a = boost::multiprecision::atan2(r.im, r.re).convert_to<double>() / (2 * std::numbers::pi);
    long j = mod(std::lround(a * static_cast<double>(d)), d);
    return abs(r - t.tau_pow(2 * j)) < tol ? j : -1;
  };
  long j1 = index_of(chi.at({1, 0}) / image({1, 0}));
  long j2 = index_of(chi.at({0, 1}) / image({0, 1}));
  if (j1 < 0 || j2 < 0) return std::nullopt;
  Pair q{j2, mod(-j1, d)};
  for (long p1 = 0; p1 < n; ++p1)
    for (long p2 = 0; p2 < n; ++p2) {
      Pair p{p1, p2};
      Complex lhs = t.tau_pow(2 * symplectic_form(p, q, d)) * image(p);
      if (abs(chi.at(p) - lhs) > tol) return std::nullopt;
    }
  return q;
}

bool esl_conjugate(const ResidueMatrix& x, const ResidueMatrix& y) {
  const long n = x.modulus();
  if (x.trace() != y.trace() || x.det() != y.det()) return false;
  for (const auto& g : esl2(n))
    if (g * x == y * g) return true;
  return false;
}

StabilizerReport stabilizer(const FiducialProjector& fp, const StabilizerOptions& options) {
  const long d = fp.d, n = dbar_of(d);
  StabilizerReport rep;
  rep.d = d;

  std::vector<ResidueMatrix> scan;
  if (options.mode == StabilizerMode::exhaustive) {
    if (d > options.max_exhaustive_dimension)
      throw SearchBudgetExceeded("exhaustive stabilizer limited to d <= " + std::to_string(options.max_exhaustive_dimension));
    scan = esl2(n);
  } else {
    for (const auto& m : options.candidates) {
      if (m.modulus() != n) throw std::invalid_argument("candidate modulus must be dbar");
      if (classify(m, n) == SymplecticClass::neither) throw std::invalid_argument("candidate not in ESL: " + m.str());
    }
    // Close the supplied set first so the verified list is a group.
    scan = options.candidates.empty() ? std::vector<ResidueMatrix>{} : generate(n, options.candidates).elements;
  }

  const OverlapTable chi = overlaps(fp);
  DoubleStabilizerTest quick{d, n, chi.to_double(), {}, 1e-8};
  for (long j = 0; j < d; ++j)
    quick.omega.push_back(std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d)));

  const int threads = options.threads > 0 ? options.threads : default_threads();
  const unsigned digits = working_digits();
  std::vector<std::vector<CliffordElement>> found(static_cast<size_t>(std::max(1, threads)));
  parallel_chunks(scan.size(), threads, [&](size_t b, size_t e, int w) {
    PrecisionScope ps(digits);
    const Real tol = structural_tolerance();
    for (size_t i = b; i < e; ++i) {
      if (!quick(scan[i])) continue;
      if (auto q = stabilizing_displacement(chi, scan[i], tol)) found[static_cast<size_t>(w)].push_back({*q, scan[i]});
    }
  });
  for (auto& part : found) rep.elements.insert(rep.elements.end(), part.begin(), part.end());
  std::sort(rep.elements.begin(), rep.elements.end());

  if (options.mode == StabilizerMode::verify_list && rep.elements.size() != scan.size())
    throw SearchBudgetExceeded("supplied generators do not all stabilize the fiducial (" + std::to_string(rep.elements.size()) +
                               " of " + std::to_string(scan.size()) + " closure elements confirmed)");

  rep.displacement_free = std::all_of(rep.elements.begin(), rep.elements.end(),
                                      [&](const CliffordElement& c) { return kernel_displacement(c.p, d); });
  std::vector<ResidueMatrix> tilde, bar;
  for (const auto& c : rep.elements)
    if (d <= 3 || (c.p[0] == 0 && c.p[1] == 0)) tilde.push_back(c.f);
  for (const auto& f : tilde) bar.push_back(f.scaled(f.det()));
  rep.s_tilde = group_from_elements(n, tilde);
  rep.s_bar = group_from_elements(n, bar);

  // Canonical order 3: det F = 1, Tr F = -1 mod d, F != I mod d; prefer q = 0.
  for (int pass = 0; pass < 2 && !rep.canonical_order3; ++pass)
    for (const auto& c : rep.elements) {
      if (c.f.det() != 1 || mod(c.f.trace() + 1, d) != 0) continue;
      if (c.f.reduced(d) == ResidueMatrix::identity(d)) continue;
      if (pass == 0 && (c.p[0] != 0 || c.p[1] != 0)) continue;
      rep.canonical_order3 = c;
      break;
    }
  if (rep.canonical_order3) {
    const ResidueMatrix& f = rep.canonical_order3->f;
    auto matches = [&](const ResidueMatrix& ref) {
      return esl_conjugate(f, ref) || (d % 2 == 0 && esl_conjugate(f, ref.scaled(1 + d)));
    };
    if (matches(f_z(d)))
      rep.type = OrbitType::z;
    else if (d % 9 == 3 && matches(f_a(d)))
      rep.type = OrbitType::a;
  }
  return rep;
}

FiducialProjector transform(const FiducialProjector& fp, const Pair& p, const ResidueMatrix& f) {
  const long n = dbar_of(fp.d);
  if (f.modulus() != n || classify(f, n) == SymplecticClass::neither) throw std::invalid_argument("transform: F must be in ESL(2, Z_dbar)");
  ExtendedOperator u = extended_unitary({{mod(p[0], fp.d), mod(p[1], fp.d)}, f}, fp.d);
  FiducialProjector out = fp;
  out.pi = conjugate_by(u, fp.pi);
  out.provenance = Provenance::transformed;
  return out;
}

bool is_simple(const StabilizerReport& report) { return report.displacement_free && report.canonical_order3.has_value(); }

namespace {

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  return {};
}

}  // namespace

FiducialFile read_fiducial(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  FiducialFile out;
  std::string line = next_content_line(in);
  if (line.rfind("sicg-fiducial 1", 0) != 0) throw FormatError(path + ": missing header 'sicg-fiducial 1'");
  long d = 0;
  std::string orbit;
  while (true) {
    line = next_content_line(in);
    if (line.empty()) throw FormatError(path + ": missing 'vector' block");
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dimension") {
      ls >> d;
    } else if (key == "orbit") {
      ls >> orbit;
    } else if (key == "digits") {
      ls >> out.digits;
    } else if (key == "expression") {
      ls >> out.expression;
    } else if (key == "vector") {
      break;
    } else {
      throw FormatError(path + ": unknown key '" + key + "'");
    }
    if (ls.fail()) throw FormatError(path + ": bad value for '" + key + "'");
  }
  if (d < 2) throw FormatError(path + ": dimension must be >= 2");
  CVector psi;
  for (long i = 0; i < d; ++i) {
    line = next_content_line(in);
    std::istringstream ls(line);
    std::string re, im;
    if (!(ls >> re >> im)) throw FormatError(path + ": expected " + std::to_string(d) + " lines 're im'");
    psi.emplace_back(parse_real(re), parse_real(im));
  }
  out.projector = FiducialProjector::from_vector(psi, Provenance::file, orbit);
  return out;
}

void write_fiducial(const std::string& path, const FiducialProjector& fp, unsigned digits, const std::string& expression) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << "sicg-fiducial 1\n";
  out << "dimension " << fp.d << "\n";
  if (!fp.orbit.empty()) out << "orbit " << fp.orbit << "\n";
  out << "digits " << digits << "\n";
  if (!expression.empty()) out << "expression " << expression << "\n";
  out << "vector\n";
  for (const auto& z : fp.vector()) out << to_fixed(z.re, static_cast<int>(digits)) << " " << to_fixed(z.im, static_cast<int>(digits)) << "\n";
}

void check_supported(const FiducialProjector& fp) {
  if (fp.d != 3) return;
  StabilizerReport rep = stabilizer(fp);
  size_t order = rep.s_tilde.order();
  if (order != 12 && order != 48)
    throw FormatError("d = 3 fiducial with |S~| = " + std::to_string(order) +
                      " lies on a generic orbit of the continuous family; only 3b (12) and 3c (48) are supported");
}

}  // namespace sicg
