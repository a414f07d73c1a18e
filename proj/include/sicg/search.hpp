#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "sicg/fiducial.hpp"
#include "sicg/numeric.hpp"
#include "sicg/residue.hpp"

namespace sicg {

enum class SearchSymmetry { fz, fa, none };
const char* to_string(SearchSymmetry s);

struct SearchConfig {
  long d = 4;
  SearchSymmetry symmetry = SearchSymmetry::fz;
  int branch = -1;           // eigenvalue branch 0, 1, 2; -1 scans all three in order
  int restarts = 64;         // per branch
  std::uint64_t seed = 1;
  unsigned polish_digits = 0;  // 0: the current working digits
  int max_iterations = 4000;   // L-BFGS iterations per restart (coarse stage runs in double)
  double coarse_tolerance = 1e-10;  // accept a restart when h - (d-1)/(d+1) is below this
  int threads = 0;
};

// Scale-invariant frame potential h(psi) = sum_{p != 0} |<psi|D_p psi>|^4 / <psi|psi>^4,
// p over Z_d^2. On unit vectors this is the usual potential; its minimum is (d-1)/(d+1).
// The gradient is returned as g_j = dh/dx_j + i dh/dy_j for psi_j = x_j + i y_j.
double frame_potential(const std::vector<std::complex<double>>& psi, long d, std::vector<std::complex<double>>* gradient = nullptr);
Real frame_potential(const CVector& psi, long d);

// Orthonormal basis of the branch-b eigenspace of U_F, where U_F^3 = c I and the
// eigenvalues are c^{1/3} omega^b with the principal cube root. F must have order 3
// up to the kernel.
std::vector<CVector> symmetric_basis(const ResidueMatrix& f, long d, int branch);
// Projection onto that eigenspace, renormalized; ZeroProjection when it vanishes.
CVector project_symmetric(const CVector& psi, const ResidueMatrix& f, long d, int branch);

// Levenberg-Marquardt on |chi_p|^2/<psi|psi>^2 - 1/(d+1) at working precision.
// Returns the unit vector; NotConverged when the residual stalls above 10^-(digits-10).
CVector polish(const CVector& psi, long d, int max_iterations = 60);

struct SearchResult {
  FiducialProjector fiducial;
  double coarse_value = 0;  // h at the end of the double-precision stage
  int branch = 0;
  int restart = 0;
  Real max_deviation;       // verify_sic deviation after polishing
};

ResidueMatrix symmetry_matrix(long d, SearchSymmetry s);

// Best restart by coarse value (ties: branch then restart index), polished and verified.
SearchResult find_fiducial(const SearchConfig& cfg);
// First converged restart, in (branch, restart) order, whose polished fiducial satisfies accept.
SearchResult find_fiducial(const SearchConfig& cfg, const std::function<bool(const FiducialProjector&)>& accept);

}  // namespace sicg
