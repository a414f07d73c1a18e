#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sicg/cyclotomic.hpp"
#include "sicg/numeric.hpp"
#include "sicg/residue.hpp"

namespace sicg {

// Prefix expressions: numbers ("3", "-1/20"), symbols (generators, "i", "pi") and
// (op args...) with op in + - * / sqrt cbrt root3 re sin cos. (root3 k x) is the
// principal cube root times omega^k.
struct Expr {
  enum class Kind { number, symbol, call };
  Kind kind = Kind::number;
  Rational number;
  std::string name;  // symbol or operator
  std::vector<std::shared_ptr<const Expr>> args;

  std::string str() const;
};
using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr parse_expr(const std::string& text);  // FormatError

using Valuation = std::map<std::string, Complex>;
Complex evaluate(const Expr& e, const Valuation& v);  // FormatError on unknown symbols

struct Generator {
  std::string name;
  ExprPtr definition;
  Complex file_value;
  std::vector<Rational> minpoly;  // leading coefficient first; empty when not given
};

// Fiducial entries Pi_{rs} as polynomials over named generators.
struct ExpressionForm {
  std::string orbit;
  long d = 0;
  unsigned digits = 0;
  std::vector<Generator> generators;
  std::vector<std::vector<ExprPtr>> entries;

  // Generators evaluated from their definitions at working precision, plus i and pi.
  Valuation valuation() const;
  CMatrix evaluate(const Valuation& v) const;
};

// Checks each definition against the tabulated value and minimal polynomial.
ExpressionForm load_expression(const std::string& path);  // FormatError, MissingExpressionData

// One row of an automorphism table: g(tau) = tau^k, generator images, and when
// known the Clifford element (q, F) with g(Pi) = U Pi U^dagger, U = D_q U_F.
struct AutomorphismSpec {
  std::string name;
  long k = 1;
  bool outer = false;  // does not commute with complex conjugation
  std::optional<ResidueMatrix> f;
  std::optional<ResidueMatrix> g;  // tabulated G, for cross-checks
  Pair q{0, 0};
  std::map<std::string, ExprPtr> images;

  // Images evaluated at v; generators without an image keep their value.
  Valuation apply(const Valuation& v) const;
};

std::vector<AutomorphismSpec> load_automorphisms(const std::string& path, long dbar);  // FormatError

}  // namespace sicg
