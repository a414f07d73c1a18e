#include <gtest/gtest.h>

#include "sicg/clifford.hpp"

using namespace sicg;

TEST(Clifford, ActionOnDisplacements) {
  PrecisionScope ps(30);
  for (long d : {3L, 4L, 6L}) {
    long n = dbar_of(d);
    int count = 0;
    for (const auto& f : esl2(n)) {
      if (f.det() != 1 || (++count % 7) != 0) continue;
      CMatrix u = symplectic_unitary(f, d);
      EXPECT_LT(max_abs_diff(u * u.adjoint(), CMatrix::identity(static_cast<int>(d))), ten_to_minus(25));
      for (long a = 0; a < d; ++a)
        for (long b = 0; b < d; ++b) {
          Pair p{a, b};
          Pair fp = f.apply(p);
          CMatrix lhs = u * displacement(p, d) * u.adjoint();
          EXPECT_LT(max_abs_diff(lhs, displacement(fp, d)), ten_to_minus(25)) << f.str();
        }
    }
  }
}

TEST(Clifford, AntiunitaryAction) {
  PrecisionScope ps(30);
  long d = 4, n = 8;
  CliffordElement e{{1, 2}, ResidueMatrix(n, 1, 2, 1, 1)};
  ASSERT_TRUE(e.antiunitary());
  auto u = extended_unitary(e, d);
  EXPECT_TRUE(u.conjugate);
  for (long a = 0; a < d; ++a)
    for (long b = 0; b < d; ++b) {
      Pair p{a, b};
      CMatrix lhs = conjugate_by(u, displacement(p, d));
      EXPECT_TRUE(equal_up_to_phase(lhs, displacement(e.f.apply(p), d), ten_to_minus(25)));
    }
}

TEST(Clifford, ComposeMatchesSequentialConjugation) {
  PrecisionScope ps(30);
  long d = 3, n = 3;
  auto u = extended_unitary({{1, 0}, ResidueMatrix(n, 1, 0, 0, 2)}, d);
  auto v = extended_unitary({{0, 2}, ResidueMatrix(n, 1, 1, 0, 1)}, d);
  CMatrix x = displacement({1, 1}, d) + displacement({2, 0}, d) * Complex(0.0, 0.5);
  CMatrix seq = conjugate_by(u, conjugate_by(v, x));
  CMatrix one = conjugate_by(compose(u, v), x);
  EXPECT_LT(max_abs_diff(seq, one), ten_to_minus(25));
}

TEST(Clifford, KernelMatchesClosedForm) {
  PrecisionScope ps(30);
  for (long d = 2; d <= 8; ++d) {
    auto brute = kernel_elements(d);
    auto closed = kernel_characterization(d);
    EXPECT_EQ(brute, closed) << d;
  }
}

TEST(Clifford, EqualUpToPhase) {
  PrecisionScope ps(30);
  CMatrix a = displacement({1, 1}, 3);
  EXPECT_TRUE(equal_up_to_phase(a * exp_i_pi(1, 7), a, ten_to_minus(25)));
  EXPECT_FALSE(equal_up_to_phase(a * Complex(2), a, ten_to_minus(25)));
  EXPECT_FALSE(equal_up_to_phase(displacement({1, 0}, 3), a, ten_to_minus(25)));
}
