#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "sicg/errors.hpp"
#include "sicg/expression.hpp"
#include "sicg/fiducial.hpp"

using namespace sicg;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  auto path = std::filesystem::temp_directory_path() / ("sicg_test_" + name);
  std::ofstream(path) << body;
  return path.string();
}

const char* kTinyHeader =
    "format sicg-expr 1\n"
    "orbit t\n"
    "dimension 2\n"
    "digits 40\n";

}  // namespace

TEST(Expression, ParseRoundTrip) {
  auto e = parse_expr("(+ (* 1/2 a) (sqrt 3) -7)");
  EXPECT_EQ(e->str(), "(+ (* 1/2 a) (sqrt 3) -7)");
}

TEST(Expression, ParseErrors) {
  EXPECT_THROW(parse_expr("(+ 1 2"), FormatError);
  EXPECT_THROW(parse_expr(")"), FormatError);
  EXPECT_THROW(parse_expr("(+ 1 2) 3"), FormatError);
  EXPECT_THROW(parse_expr("()"), FormatError);
}

TEST(Expression, EvaluateArithmetic) {
  PrecisionScope ps(40);
  Valuation v{{"a", Complex(Real(2))}};
  EXPECT_LT(abs(evaluate(*parse_expr("(- (* a a) (/ 1 2))"), v) - Complex(Real(3.5))), ten_to_minus(35));
  Complex s = evaluate(*parse_expr("(sqrt -4)"), v);
  EXPECT_LT(abs(s - Complex(Real(0), Real(2))), ten_to_minus(35));
  Complex w = evaluate(*parse_expr("(root3 1 8)"), v);
  EXPECT_LT(abs(w * w * w - Complex(Real(8))), ten_to_minus(30));
  EXPECT_GT(w.im, 0);
  EXPECT_LT(abs(evaluate(*parse_expr("(cos pi)"), v) + Complex(Real(1))), ten_to_minus(35));
  EXPECT_THROW(evaluate(*parse_expr("(+ zz 1)"), v), FormatError);
  EXPECT_THROW(evaluate(*parse_expr("(frob 1)"), v), FormatError);
}

TEST(Expression, LoadChecksGeneratorValues) {
  PrecisionScope ps(40);
  std::string good = std::string(kTinyHeader) +
                     "gen a (sqrt 2) 1.41421356237309504880168872420969807856967187537694807317668 0\n"
                     "minpoly a 1 0 -2\n"
                     "entry 0 0 (/ 1 2)\nentry 0 1 (* 1/2 (/ a a))\nentry 1 0 1/2\nentry 1 1 1/2\n";
  auto form = load_expression(write_temp("good.expr", good));
  EXPECT_EQ(form.d, 2);
  ASSERT_EQ(form.generators.size(), 1u);
  EXPECT_EQ(form.generators[0].minpoly.size(), 3u);

  std::string wrong_value = std::string(kTinyHeader) + "gen a (sqrt 2) 1.5 0\nentry 0 0 1\nentry 0 1 0\nentry 1 0 0\nentry 1 1 0\n";
  EXPECT_THROW(load_expression(write_temp("wrong.expr", wrong_value)), FormatError);

  std::string wrong_poly = std::string(kTinyHeader) +
                           "gen a (sqrt 2) 1.41421356237309504880168872420969807856967187537694807317668 0\n"
                           "minpoly a 1 0 -3\nentry 0 0 1\nentry 0 1 0\nentry 1 0 0\nentry 1 1 0\n";
  EXPECT_THROW(load_expression(write_temp("poly.expr", wrong_poly)), FormatError);

  std::string missing = std::string(kTinyHeader) + "entry 0 0 1\n";
  EXPECT_THROW(load_expression(write_temp("missing.expr", missing)), FormatError);
  EXPECT_THROW(load_expression("/nonexistent/x.expr"), MissingExpressionData);
}

TEST(Expression, AutomorphismFileParses) {
  std::string body =
      "format sicg-aut 1\norbit t\n"
      "aut g k 3 F 0 4 1 0 q 0 0 G 1 3 2 4\nimg a (- a)\nend\n"
      "aut h k 1 outer\nend\n";
  auto specs = load_automorphisms(write_temp("x.aut", body), 5);
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[0].k, 3);
  ASSERT_TRUE(specs[0].f);
  EXPECT_EQ(*specs[0].f, ResidueMatrix(5, 0, 4, 1, 0));
  EXPECT_TRUE(specs[1].outer);
  EXPECT_FALSE(specs[1].f);
  EXPECT_THROW(load_automorphisms(write_temp("bad.aut", "format sicg-aut 1\naut g k 1\n"), 5), FormatError);
  EXPECT_THROW(load_automorphisms(write_temp("bad2.aut", "format sicg-aut 1\nimg a 1\n"), 5), FormatError);
}

TEST(Expression, BundledFormsAreSics) {
  PrecisionScope ps(50);
  for (const char* orbit : {"4a", "5a"}) {
    auto form = load_expression(std::string(SICG_DATA_DIR) + "/expr/" + orbit + ".expr");
    FiducialProjector fp;
    fp.d = form.d;
    fp.pi = form.evaluate(form.valuation());
    EXPECT_TRUE(verify_sic(fp, ten_to_minus(40)).pass) << orbit;
  }
}
