#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sicg {

using Pair = std::array<long, 2>;

long mod(long a, long n);
long gcd(long a, long b);
bool is_unit(long a, long n);
long inverse_mod(long a, long n);  // NonInvertible
long dbar_of(long d);              // d for odd d, 2d for even d

// 2x2 matrix over Z_n, entries kept in [0, n).
class ResidueMatrix {
 public:
  ResidueMatrix() = default;
  ResidueMatrix(long n, long alpha, long beta, long gamma, long delta);

  static ResidueMatrix identity(long n);
  static ResidueMatrix scalar(long n, long s);

  long modulus() const { return n_; }
  long alpha() const { return a_; }
  long beta() const { return b_; }
  long gamma() const { return c_; }
  long delta() const { return d_; }
  long det() const { return det_; }
  long trace() const { return mod(a_ + d_, n_); }

  bool is_invertible() const { return is_unit(det_, n_); }
  ResidueMatrix inverse() const;  // NonInvertible
  ResidueMatrix pow(long e) const;
  ResidueMatrix operator*(const ResidueMatrix& o) const;
  ResidueMatrix operator+(const ResidueMatrix& o) const;
  ResidueMatrix scaled(long s) const;
  // Same entries read modulo a divisor m of n.
  ResidueMatrix reduced(long m) const;
  Pair apply(const Pair& p) const;

  // Dense index a*n^3 + b*n^2 + c*n + d; order agrees with lexicographic order.
  std::uint64_t code() const;
  static ResidueMatrix from_code(long n, std::uint64_t code);

  std::string str() const;

  auto operator<=>(const ResidueMatrix& o) const = default;

 private:
  std::int32_t n_ = 1;
  std::int32_t a_ = 0;
  std::int32_t b_ = 0;
  std::int32_t c_ = 0;
  std::int32_t d_ = 0;
  std::int32_t det_ = 0;
};

enum class SymplecticClass { symplectic, antisymplectic, neither };

SymplecticClass classify(const ResidueMatrix& m, long dbar);
const char* to_string(SymplecticClass c);
ResidueMatrix invert(const ResidueMatrix& m);
bool is_prime_matrix(const ResidueMatrix& f, long dbar);
// Scans F2 = (0,-1;1,0), then (1,c;0,1)(0,-1;1,0) for c = 1, 2, ... and
// returns (F*F2^-1, F2) for the first candidate whose left factor is prime.
std::pair<ResidueMatrix, ResidueMatrix> prime_decompose(const ResidueMatrix& f, long dbar);

// F_z = (0 d-1; d+1 d-1) and, for d = 9k+3, F_a = (1 d+3; d+3k d-2), both mod dbar.
ResidueMatrix f_z(long d);
ResidueMatrix f_a(long d);
ResidueMatrix j_matrix(long n);  // diag(1, -1)

struct MatrixGroup {
  long modulus = 1;
  std::vector<ResidueMatrix> elements;    // sorted lexicographically
  std::vector<ResidueMatrix> generators;  // as supplied

  std::size_t order() const { return elements.size(); }
  bool contains(const ResidueMatrix& m) const;
  bool is_abelian() const;
};

inline constexpr std::size_t kDefaultGroupCap = 100000000;

MatrixGroup generate(long n, const std::vector<ResidueMatrix>& generators, std::size_t cap = kDefaultGroupCap);
MatrixGroup group_from_elements(long n, std::vector<ResidueMatrix> elements);
MatrixGroup centralizer(const MatrixGroup& h, long n, std::size_t cap = kDefaultGroupCap, int threads = 0);
MatrixGroup normalizer(const MatrixGroup& h, long n, std::size_t cap = kDefaultGroupCap, int threads = 0);

// All matrices with unit determinant, or determinant +-1, in lexicographic order.
std::vector<ResidueMatrix> gl2(long n);
std::vector<ResidueMatrix> esl2(long n);
std::size_t gl2_order(long n);

struct AbelianInvariants {
  std::vector<long> factors;  // n1 | n2 | ... | nk, all > 1
  long order() const;
  std::string str() const;    // "Z2 + Z4", or "Z1" when trivial
  bool operator==(const AbelianInvariants&) const = default;
};

// Invariant factors of a finite abelian group given by its multiplication table.
AbelianInvariants abelian_invariants(const std::vector<std::vector<int>>& table, int identity);

// Cosets of n in g (left cosets gN), representatives are the least elements.
struct CosetTable {
  std::vector<ResidueMatrix> representatives;
  std::vector<std::vector<int>> product;  // coset of rep_i * rep_j
  int identity = 0;
  int coset_of(const ResidueMatrix& m) const;
  std::vector<std::uint64_t> codes;   // sorted codes of g
  std::vector<int> coset_index;       // parallel to codes
};

CosetTable coset_table(const MatrixGroup& g, const MatrixGroup& n);  // NotNormal
AbelianInvariants quotient_invariants(const MatrixGroup& g, const MatrixGroup& n);  // NotNormal, NotAbelian

long squarefree_part(long m);

}  // namespace sicg
