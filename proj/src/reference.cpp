#include "sicg/reference.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sicg/errors.hpp"
#include "sicg/numeric.hpp"

#ifndef SICG_DATA_DIR
#define SICG_DATA_DIR "data"
#endif

namespace sicg {

std::string data_dir() {
  if (const char* env = std::getenv("SICG_DATA_DIR"); env && *env) return env;
  return SICG_DATA_DIR;
}

std::vector<std::string> OrbitRecord::member_labels() const {
  if (!doublet) return {label};
  // "9ab" -> "9a", "9b"
  std::string stem = label.substr(0, label.size() - 2);
  return {stem + label[label.size() - 2], stem + label.back()};
}

const BoxGenerator* OrbitRecord::generator(const std::string& name) const {
  for (const auto& g : generators)
    if (g.name == name) return &g;
  return nullptr;
}

std::vector<ResidueMatrix> OrbitRecord::centralizer_generators() const {
  std::vector<ResidueMatrix> out{g0};
  for (const auto& g : generators) {
    if (!g.g) continue;
    const std::string& n = g.name;
    bool own = doublet ? (n.size() > 1 && n[0] == 'a' && std::isdigit(static_cast<unsigned char>(n[1])))
                       : (!n.empty() && std::isdigit(static_cast<unsigned char>(n[0])));
    if (own) out.push_back(*g.g);
  }
  return out;
}

namespace {

// H = det(F) F G; diag(1, k) with k a unit when G = det(F) F^-1 H.
std::optional<long> k_from_pair(const ResidueMatrix& f, const ResidueMatrix& g) {
  ResidueMatrix h = (f * g).scaled(f.det());
  const long n = f.modulus();
  if (h.alpha() != 1 || h.beta() != 0 || h.gamma() != 0 || !is_unit(h.delta(), n)) return std::nullopt;
  if (f.det() != 1 && f.det() != mod(-1, n)) return std::nullopt;
  return h.delta();
}

}  // namespace

std::vector<std::string> consistency_issues(const OrbitRecord& r) {
  std::vector<std::string> out;
  const long n = dbar_of(r.d);
  MatrixGroup sf = generate(n, {r.f0});
  MatrixGroup sg = generate(n, {r.g0});
  if (sf.order() != r.s_tilde_order || sg.order() != r.s_tilde_order) out.push_back("s_tilde");
  std::vector<ResidueMatrix> sbar;
  for (const auto& f : sf.elements) sbar.push_back(f.scaled(f.det()));
  if (group_from_elements(n, sbar).elements != sg.elements) out.push_back("s_bar");
  if (generate(n, r.centralizer_generators()).order() != r.centralizer_order) out.push_back("centralizer");
  for (const auto& g : r.generators)
    if (g.f && g.g && !k_from_pair(*g.f, *g.g)) out.push_back("pair:" + g.name);
  return out;
}

namespace {

std::string strip(std::string line) {
  if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
  return line;
}

struct Lines {
  std::ifstream in;
  std::string path;
  int lineno = 0;

  explicit Lines(const std::string& p) : in(p), path(p) {
    if (!in) throw FormatError("cannot open " + p);
    std::string first;
    if (!next(first) || first.rfind("format ", 0) != 0) throw fail("missing format header");
  }
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      line = strip(line);
      if (!line.empty()) return true;
    }
    return false;
  }
  FormatError fail(const std::string& why) const { return FormatError(path + ":" + std::to_string(lineno) + ": " + why); }
};

}  // namespace

std::vector<OrbitRecord> load_orbit_records(const std::string& path) {
  Lines src(path);
  std::vector<OrbitRecord> out;
  std::string line;
  OrbitRecord* cur = nullptr;
  while (src.next(line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    auto matrix = [&]() {
      long x[4];
      for (auto& e : x)
        if (!(ls >> e)) throw src.fail("matrix needs 4 entries");
      return ResidueMatrix(dbar_of(cur->d), x[0], x[1], x[2], x[3]);
    };
    auto pair = [&](long m) {
      long a, b;
      if (!(ls >> a >> b)) throw src.fail("vector needs 2 entries");
      return Pair{mod(a, m), mod(b, m)};
    };
    if (key == "orbit") {
      if (cur) throw src.fail("missing 'end'");
      out.emplace_back();
      cur = &out.back();
      ls >> cur->label;
      continue;
    }
    if (!cur) throw src.fail("'" + key + "' outside an orbit record");
    if (key == "end") {
      for (const auto& issue : consistency_issues(*cur))
        if (!cur->errata.count(issue)) throw src.fail("orbit " + cur->label + " fails check " + issue);
      cur = nullptr;
      continue;
    }
    if (cur->d == 0 && key != "d") throw src.fail("'d' must come first");
    if (key == "d") {
      ls >> cur->d;
      if (cur->d < 2) throw src.fail("bad dimension");
    } else if (key == "kind") {
      std::string k;
      ls >> k;
      if (k != "singlet" && k != "doublet") throw src.fail("kind must be singlet or doublet");
      cur->doublet = k == "doublet";
    } else if (key == "sqrt_d_in_E") {
      std::string v;
      ls >> v;
      cur->sqrt_d_in_e = v == "yes";
    } else if (key == "orders") {
      std::string a, b;
      ls >> a >> cur->s_tilde_order >> b >> cur->centralizer_order;
      if (a != "s_tilde" || b != "centralizer") throw src.fail("orders s_tilde <n> centralizer <n>");
    } else if (key == "transform") {
      OrbitTransform t;
      std::string p, f;
      ls >> t.label >> p;
      t.p = pair(cur->d);
      ls >> f;
      if (p != "p" || f != "F") throw src.fail("transform <label> p x y F a b c d");
      t.f = matrix();
      cur->transforms.push_back(t);
    } else if (key == "F0") {
      cur->f0 = matrix();
    } else if (key == "G0") {
      cur->g0 = matrix();
    } else if (key == "gen") {
      BoxGenerator g;
      ls >> g.name;
      std::string tok;
      while (ls >> tok) {
        if (tok == "F") g.f = matrix();
        else if (tok == "G") g.g = matrix();
        else if (tok == "r") g.r = pair(3);
        else if (tok == "q") g.q = pair(cur->d);
        else throw src.fail("unknown generator field '" + tok + "'");
      }
      if (g.f && g.g) g.k = k_from_pair(*g.f, *g.g);
      cur->generators.push_back(std::move(g));
    } else if (key == "erratum") {
      std::string check;
      ls >> check;
      cur->errata.insert(check);
    } else {
      throw src.fail("unknown key '" + key + "'");
    }
    if (ls.fail() && !ls.eof()) throw src.fail("bad value");
  }
  if (cur) throw FormatError(path + ": missing 'end'");
  return out;
}

const OrbitRecord* find_orbit(const std::vector<OrbitRecord>& records, const std::string& label) {
  for (const auto& r : records) {
    if (r.label == label) return &r;
    for (const auto& m : r.member_labels())
      if (m == label) return &r;
  }
  return nullptr;
}

std::map<long, long> load_a_values(const std::string& path) {
  Lines src(path);
  std::map<long, long> out;
  std::string line;
  while (src.next(line)) {
    std::istringstream ls(line);
    long d, a;
    if (!(ls >> d >> a)) throw src.fail("expected 'd a'");
    out[d] = a;
  }
  return out;
}

std::map<std::string, FieldRow> load_fields(const std::string& path) {
  Lines src(path);
  std::map<std::string, FieldRow> out;
  std::string line;
  while (src.next(line)) {
    std::istringstream ls(line);
    std::string orbit, tok;
    ls >> orbit;
    FieldRow row;
    bool second = false;
    while (ls >> tok) {
      if (tok == "|") {
        second = true;
        continue;
      }
      (second ? row.e0 : row.ec).push_back(std::stol(tok));
    }
    if (!second || row.ec.empty() || row.e0.empty()) throw src.fail("expected 'orbit ec... | e0...'");
    out[orbit] = row;
  }
  return out;
}

std::vector<CubeRootRow> load_cube_roots(const std::string& path) {
  Lines src(path);
  std::vector<CubeRootRow> out;
  std::string line;
  while (src.next(line)) {
    std::istringstream ls(line);
    CubeRootRow r;
    if (!(ls >> r.orbit >> r.d >> r.n >> r.m >> r.l)) throw src.fail("expected 'orbit d n m l'");
    out.push_back(r);
  }
  return out;
}

bool cube_root_row_holds(const CubeRootRow& row) {
  const long c = row.d % 2 == 0 ? 1 : 8;
  const long d3 = row.d * row.d * row.d;
  if (27 * (row.n * row.n + row.m * row.m * row.l) != c * d3) return false;
  PrecisionScope ps(40);
  Complex z = cbrt(Complex(Real(row.n), Real(row.m) * sqrt(Real(row.l))));
  Real x = 2 * z.re;
  Real p = x * x * x - Real(row.d % 2 == 0 ? row.d : 2 * row.d) * x - Real(2 * row.n);
  return abs(Complex(p)) < ten_to_minus(30);
}

}  // namespace sicg
