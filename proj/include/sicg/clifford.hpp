#pragma once

#include <string>
#include <vector>

#include "sicg/numeric.hpp"
#include "sicg/residue.hpp"
#include "sicg/weyl_heisenberg.hpp"

namespace sicg {

// D_p U_F up to phase; antiunitary exactly when det F = -1.
struct CliffordElement {
  DisplacementIndex p{0, 0};  // mod d
  ResidueMatrix f;            // mod dbar

  bool antiunitary() const { return f.det() == mod(-1, f.modulus()); }
  std::string str() const;
  auto operator<=>(const CliffordElement&) const = default;
};

// Linear part plus a flag: the operator acts as v -> matrix * (conjugate ? conj(v) : v).
struct ExtendedOperator {
  CMatrix matrix;
  bool conjugate = false;
};

// F in SL(2, Z_dbar). Prime F uses the closed form; otherwise U_{F1} U_{F2}.
CMatrix symplectic_unitary(const ResidueMatrix& f, long d);
ExtendedOperator extended_unitary(const CliffordElement& e, long d);

// U X U^dagger for a linear or antilinear U.
CMatrix conjugate_by(const ExtendedOperator& u, const CMatrix& x);
// Composition u * v as operators.
ExtendedOperator compose(const ExtendedOperator& u, const ExtendedOperator& v);

bool equal_up_to_phase(const CMatrix& a, const CMatrix& b, const Real& tol);

// Brute force over p in Z_d^2 and F in SL(2, Z_dbar): all D_p U_F equal to I up to phase.
std::vector<CliffordElement> kernel_elements(long d);
// The closed-form list: (0, I) for odd d; for even d the eight elements
// p = (s d/2, t d/2), F = (1 + r d, s d; t d, 1 + r d), r, s, t in {0, 1}.
std::vector<CliffordElement> kernel_characterization(long d);

}  // namespace sicg
