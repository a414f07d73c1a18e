#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sicg/clifford.hpp"
#include "sicg/numeric.hpp"
#include "sicg/residue.hpp"

namespace sicg {

enum class Provenance { searched, file, transformed, constructed };
const char* to_string(Provenance p);

// Rank-1 projector |psi><psi| with <psi|psi> = 1.
struct FiducialProjector {
  long d = 0;
  CMatrix pi;
  Provenance provenance = Provenance::constructed;
  std::string orbit;  // label when known, e.g. "8b"

  static FiducialProjector from_vector(const CVector& psi, Provenance provenance, std::string orbit = {});
  // A unit vector with Pi = |psi><psi|, phase fixed so its largest component is real positive.
  CVector vector() const;
};

struct SicReport {
  Real max_deviation;     // max over p != 0 of | |chi_p|^2 - 1/(d+1) |
  Pair worst{0, 0};
  Real frame_deviation;   // || sum_p D_p Pi D_p^dagger - d I ||_max
  bool pass = false;
};

// NotAProjector when Hermiticity, idempotence or unit trace fail at 10 * tol.
SicReport verify_sic(const FiducialProjector& pi, const Real& tol);

// chi_p = Tr(Pi D_p) on the full Z_dbar^2 grid; D_p is taken with unreduced
// indices, so values for p and p + d e differ by the sign tau^d where required.
class OverlapTable {
 public:
  OverlapTable() = default;
  OverlapTable(long d, std::vector<Complex> values);

  long dimension() const { return d_; }
  long dbar() const { return n_; }
  const Complex& at(const Pair& p) const { return v_[index(p)]; }
  Complex& at(const Pair& p) { return v_[index(p)]; }
  const std::vector<Complex>& values() const { return v_; }
  std::vector<std::complex<double>> to_double() const;

 private:
  std::size_t index(const Pair& p) const { return static_cast<std::size_t>(mod(p[0], n_) * n_ + mod(p[1], n_)); }
  long d_ = 0;
  long n_ = 0;
  std::vector<Complex> v_;
};

OverlapTable overlaps(const FiducialProjector& pi);

enum class OrbitType { z, a, neither };
const char* to_string(OrbitType t);

struct StabilizerReport {
  long d = 0;
  std::vector<CliffordElement> elements;  // every (q mod d, F mod dbar) with D_q U_F Pi = Pi D_q U_F
  bool displacement_free = false;
  std::optional<CliffordElement> canonical_order3;
  OrbitType type = OrbitType::neither;
  MatrixGroup s_tilde;  // F with q = 0; for d <= 3 all matrix parts
  MatrixGroup s_bar;    // (det F) F over s_tilde
};

enum class StabilizerMode { exhaustive, verify_list };

struct StabilizerOptions {
  StabilizerMode mode = StabilizerMode::exhaustive;
  std::vector<ResidueMatrix> candidates;  // verify_list: matrices to test (mod dbar)
  int threads = 0;                        // 0 = default_threads()
  long max_exhaustive_dimension = 16;
};

// Does D_q U_F (antiunitary when det F = -1) fix Pi? Solved from overlaps:
// returns q when some q works.
std::optional<Pair> stabilizing_displacement(const OverlapTable& chi, const ResidueMatrix& f, const Real& tol);

StabilizerReport stabilizer(const FiducialProjector& pi, const StabilizerOptions& options = {});

// Is x conjugate to y inside ESL(2, Z_n)?
bool esl_conjugate(const ResidueMatrix& x, const ResidueMatrix& y);

// D_p U_F Pi U_F^dagger D_p^dagger, with conjugation when det F = -1.
FiducialProjector transform(const FiducialProjector& pi, const Pair& p, const ResidueMatrix& f);

bool is_simple(const StabilizerReport& report);

// Versioned text format: header "sicg-fiducial 1", then "dimension", "orbit",
// "digits", optional "expression <file>", then "vector" and d lines "re im".
struct FiducialFile {
  FiducialProjector projector;
  unsigned digits = 0;
  std::string expression;  // relative to the data directory, may be empty
};

FiducialFile read_fiducial(const std::string& path);  // FormatError
void write_fiducial(const std::string& path, const FiducialProjector& pi, unsigned digits, const std::string& expression = {});

// Rejects d = 3 fiducials off the special orbits 3b (|S~| = 12) and 3c (48);
// generic members of the continuous family have transcendental fields.
void check_supported(const FiducialProjector& pi);

}  // namespace sicg
