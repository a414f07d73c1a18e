#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sicg/residue.hpp"

namespace sicg {

// Data directory: $SICG_DATA_DIR when set, else the compiled-in default.
std::string data_dir();

// A generator row of an orbit box. k is derived from H = det(F) F G = diag(1, k).
struct BoxGenerator {
  std::string name;  // "1", "2", "as", "a1", "bar1", ...
  std::optional<ResidueMatrix> f, g;
  std::optional<Pair> r, q;
  std::optional<long> k;
};

struct OrbitTransform {
  std::string label;
  Pair p{0, 0};
  ResidueMatrix f;
};

struct OrbitRecord {
  std::string label;  // "4a", or "9ab" for a doublet
  long d = 0;
  bool doublet = false;
  bool sqrt_d_in_e = true;
  std::size_t s_tilde_order = 0;
  std::size_t centralizer_order = 0;
  std::vector<OrbitTransform> transforms;
  ResidueMatrix f0, g0;
  std::vector<BoxGenerator> generators;
  std::set<std::string> errata;  // checks whose failure the data file declares

  std::vector<std::string> member_labels() const;  // {"9a", "9b"} or {"4a"}
  const BoxGenerator* generator(const std::string& name) const;
  // G0 and the orbit-preserving generators of orbit a (digits, or a-digits for doublets).
  std::vector<ResidueMatrix> centralizer_generators() const;
};

// Names of failing checks: "s_tilde", "s_bar", "centralizer", "pair:<gen>".
std::vector<std::string> consistency_issues(const OrbitRecord& r);

// FormatError on malformed input or on a failing check not declared as an erratum.
std::vector<OrbitRecord> load_orbit_records(const std::string& path);
const OrbitRecord* find_orbit(const std::vector<OrbitRecord>& records, const std::string& label);

struct FieldRow {
  std::vector<long> ec;  // radicands of E_c
  std::vector<long> e0;  // radicands of E_0
};
std::map<long, long> load_a_values(const std::string& path);             // d -> a^2
std::map<std::string, FieldRow> load_fields(const std::string& path);    // orbit -> row

struct CubeRootRow {
  std::string orbit;
  long d = 0, n = 0, m = 0, l = 0;
};
std::vector<CubeRootRow> load_cube_roots(const std::string& path);
// n^2 + m^2 l equals d^3/27 (even d) or 8 d^3/27 (odd d), and 2 Re((n + i m sqrt l)^(1/3))
// is a root of x^3 - c d x - 2n with c = 1 (even) or 2 (odd).
bool cube_root_row_holds(const CubeRootRow& row);

}  // namespace sicg
