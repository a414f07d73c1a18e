#pragma once

#include <vector>

#include "sicg/numeric.hpp"
#include "sicg/residue.hpp"

namespace sicg {

// p = (p1, p2); callers state whether components are taken mod d or mod dbar.
using DisplacementIndex = Pair;

// tau^j = e^{i pi j (d+1)/d} for j mod 2d, evaluated once per (d, precision).
class RootTable {
 public:
  explicit RootTable(long d);
  long dimension() const { return d_; }
  const Complex& tau_pow(long j) const { return table_[static_cast<size_t>(mod(j, 2 * d_))]; }

 private:
  long d_;
  std::vector<Complex> table_;
};

const RootTable& roots(long d);

long symplectic_form(const DisplacementIndex& p, const DisplacementIndex& q, long modulus);

// Exponent of tau in (D_p)_{s+p1, s}: p1 p2 + 2 s p2, reduced mod 2d. Unreduced
// p components are honoured, which makes D_p periodic mod dbar rather than d.
long displacement_exponent(const DisplacementIndex& p, long s, long d);

CMatrix displacement(const DisplacementIndex& p, long d);

// A_p = Tr(A D_p^dagger) / d for p in Z_d^2, indexed p1 * d + p2.
std::vector<Complex> expand(const CMatrix& a);
CMatrix reconstruct(const std::vector<Complex>& coefficients, long d);

// Tr(A D_p) without forming D_p.
Complex trace_with_displacement(const CMatrix& a, const DisplacementIndex& p);

}  // namespace sicg
