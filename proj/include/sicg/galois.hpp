#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "sicg/expression.hpp"
#include "sicg/fiducial.hpp"
#include "sicg/numeric.hpp"
#include "sicg/residue.hpp"

namespace sicg {

using BigInt = boost::multiprecision::mpz_int;

ResidueMatrix h_matrix(long k, long dbar);  // diag(1, k); NotCoprime

// An automorphism g with g(tau) = tau^k and g(Pi) = D_q U_F Pi (D_q U_F)^dagger.
// q is read mod d and vanishes unless 3 | d, where q = 0 mod d/3.
struct GaloisDatum {
  long k = 1;
  ResidueMatrix f;
  Pair q{0, 0};
};

// G_g = det(F) F^-1 H_g, an element of GL(2, Z_dbar).
ResidueMatrix derive_G(const GaloisDatum& g);
// r_g = -(3k/d) H^-1 q mod 3; zero unless 3 | d. BadRVector when q is not a multiple of d/3.
Pair derive_r(const GaloisDatum& g, long d);
// Composition g1 g2 (apply g2 first): k = k1 k2, F = H1 F2 H1^-1 F1, q = H1 q2 + (H1 F2 H1^-1) q1.
GaloisDatum compose(const GaloisDatum& g1, const GaloisDatum& g2, long d);

struct Theorem1Result {
  bool displacement = false;  // g(D_p) == D_{Hp} exactly in Q(zeta_m)
  bool unitary = false;       // g(sqrt(d) U_F) equals sqrt(d) U_{H F H^-1} up to phase
};
// F must be a prime matrix of determinant 1.
Theorem1Result theorem1_check(long k, const Pair& p, const ResidueMatrix& f, long d, const Real& tol);

// chi'_p = sigma^<r,p> chi_{Gp} with sigma = e^{2 pi i/3}; BadRVector if r != 0 and 3 does not divide d.
OverlapTable overlap_action(const OverlapTable& chi, const ResidueMatrix& g, const Pair& r);

// Pi' = (1/d) sum_{p in Z_d^2} chi'_p D_{H_k p}^dagger. k = 1 is the plain overlap
// expansion; k = k_g reconstructs g(Pi) from chi'_p = g(chi_p).
CMatrix reconstruct_from_overlaps(const OverlapTable& chi, long k = 1);
// verify_sic at tol on the reconstruction; false (never throws) when it is not a rank-1 projector.
bool verify_action_is_fiducial(const OverlapTable& chi, const Real& tol, long k = 1);
// Some r (all of Z_3^2 when 3 | d, else 0) and k = +-det G make overlap_action(chi, g, r) a fiducial.
bool admits_fiducial_action(const OverlapTable& chi, const ResidueMatrix& g, const Real& tol);

// Small integer vector c with sum c_i x_i ~ 0, c_0 != 0, from LLL on the lattice
// (e_i, round(10^(digits-5) x_i)). Accepted when max |c_i| is far below the size a
// random vector would need and the residual is below 10^(-3 digits / 4).
std::optional<std::vector<BigInt>> integer_relation(const std::vector<Real>& x, int digits);
// x lies in the real field Q(sqrt(m) : m in radicands), tested by integer relation
// against the products of the square roots.
bool in_real_field(const Complex& x, const std::vector<long>& radicands, int digits);

// Action of one Galois element: chi_p -> sigma^<r,p> chi_{Gp} together with tau -> tau^k.
// k = +-det G; when 3 | d, kappa = k mod 3 fixes the sign.
struct GaloisElement {
  ResidueMatrix g;  // representative of the coset G S-bar
  Pair r{0, 0};
  long k = 1;       // mod dbar
  int kappa() const { return static_cast<int>(mod(k, 3)); }
  auto operator<=>(const GaloisElement&) const = default;
};
// (G1, r1, k1)(G2, r2, k2) = (G1 G2, k1 r2 + det(G2) G2^-1 r1, k1 k2); r mod 3.
GaloisElement multiply(const GaloisElement& a, const GaloisElement& b, long d);
// A datum realizing the element: F = (det G / k) H G^-1 and q = (d/3) u with u = -k^-1 H r mod 3.
GaloisDatum datum_for(const GaloisElement& e, long d);

struct DiscoveryOptions {
  std::vector<long> radicands;  // E_0 = Q(sqrt(m) : m in radicands); empty means Q
  int test_points = 6;
  int threads = 0;
  std::size_t max_subgroups = 200000;
  std::size_t max_lifts = 2000000;  // lift combinations tried when 3 | d
};

struct DiscoveryResult {
  long d = 0;
  MatrixGroup s_bar;
  MatrixGroup normalizer;
  MatrixGroup centralizer;
  std::size_t quotient_order = 0;  // |N / S-bar|
  std::size_t subgroups = 0;       // subgroups of N / S-bar enumerated
  std::vector<GaloisElement> image;  // one entry per (coset, r, k)
  MatrixGroup image_g;               // union of the image cosets in N
  AbelianInvariants invariants;      // image_g / S-bar; empty when non-abelian
  bool image_abelian = false;
  AbelianInvariants centralizer_invariants;  // C / S-bar; empty when non-abelian
  bool equals_centralizer = false;
  bool homomorphism = false;    // datum composition matches the group law on all pairs
  bool unique_r = false;        // at most one r per (coset, k)
  bool unique_minimum = false;  // exactly one passing candidate of least size at every stage
  std::optional<bool> p_realized;  // some k = -1 automorphism fixes every overlap; nullopt if undecided
  std::vector<ResidueMatrix> non_data;  // coset representatives of N / S-bar outside the image
};

// Minimal subgroup of N(S-bar)/S-bar whose orbit sums sum_gamma gamma(chi_p) lie in E_0,
// lifted with r when 3 | d, and with k fixed by tau-weighted orbit sums.
// SearchBudgetExceeded past the limits.
DiscoveryResult discover_galois_orbit(const FiducialProjector& pi, const StabilizerReport& st, const DiscoveryOptions& options);

// Case 1-4 from sqrt(d) in E and P non-empty.
int structure_case(bool sqrt_d_in_e, bool p_nonempty);

// Data (G, r, kappa) with G in N(S-bar) mapping the orbit of a into the orbit of b:
// sums over K and its g-translate, sum_K gamma(chi^a_p) + (g gamma)(chi^a_p) with
// g(chi^a_x) = sigma^<r,x> chi^b_{Gx}, lie in E_c = Q(sqrt(m) : m in radicands).
// G must carry S-bar of a onto S-bar of b; k records kappa when 3 | d.
std::vector<GaloisElement> discover_doublet_map(const FiducialProjector& a, const FiducialProjector& b, const DiscoveryResult& ka,
                                                const StabilizerReport& sb, const std::vector<long>& ec_radicands, int test_points = 6,
                                                int threads = 0);

// Passing maps consistent with a tabulated datum up to the choice of frame on each side:
// count of (map, s) with r and kappa equal and M = G_tab (G s)^-1, s in S-bar(a), of
// determinant +-1 and normalizing S-bar(b).
std::size_t doublet_alignment(const std::vector<GaloisElement>& maps, const GaloisElement& tabulated, const MatrixGroup& sbar_a,
                              const MatrixGroup& sbar_b);

// {n I + m G : det coprime to n}: the centralizer law for type z (G = F) and its type-a variant.
MatrixGroup span_group(const ResidueMatrix& g, long n);
// {n I + m G + (n/3) H} over all solutions G of 3G = F - I and arbitrary H.
MatrixGroup type_a_centralizer_formula(const ResidueMatrix& f, long n);

FiducialProjector apply_automorphism(const ExpressionForm& form, const AutomorphismSpec& spec);

struct GUnitaryReport {
  Real residual;          // || U_g^dagger g(Pi) U_g - Pi ||_max
  Real lambda_sq;         // |lambda|^2 from V_g Psi = lambda Psi, Psi = Pi e_s
  Real ratio_g;           // g(<Psi|Psi>) / <Psi|Psi>
  std::optional<Real> ratio_g_inverse;  // g^-1(<Psi|Psi>) / <Psi|Psi> when the order of g is found
  int order = 0;          // order of the generator substitution, 0 if not found within 24
};
// MissingExpressionData unless spec carries F.
GUnitaryReport g_unitary_check(const ExpressionForm& form, const AutomorphismSpec& spec);

}  // namespace sicg
