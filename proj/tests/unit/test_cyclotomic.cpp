#include <gtest/gtest.h>

#include "sicg/cyclotomic.hpp"
#include "sicg/errors.hpp"
#include "sicg/residue.hpp"

using namespace sicg;

TEST(Cyclotomic, PolynomialDegreeIsPhi) {
  for (long m = 1; m <= 60; ++m) EXPECT_EQ(static_cast<long>(cyclotomic_polynomial(m).size()) - 1, euler_phi(m));
  EXPECT_EQ(cyclotomic_polynomial(12), (std::vector<long>{1, 0, -1, 0, 1}));
}

TEST(Cyclotomic, TauHasOrder2dbar) {
  for (long d = 2; d <= 12; ++d) {
    auto t = tau(d);
    long m = tau_conductor(d);
    EXPECT_TRUE(t.pow(m) == CyclotomicElement::rational(m, 1)) << d;
    // tau^{d+1} ... tau^{d^2} is d-periodic in the exponent structure: tau^(dbar) = +-1.
    auto td = t.pow(dbar_of(d));
    EXPECT_TRUE(td == CyclotomicElement::rational(m, 1) || td == CyclotomicElement::rational(m, -1));
  }
}

TEST(Cyclotomic, EmbedMatchesNumericTau) {
  PrecisionScope ps(40);
  for (long d = 2; d <= 9; ++d) {
    Complex z = embed(tau(d));
    Complex w = -exp_i_pi(1, d);
    EXPECT_LT(abs(z - w), ten_to_minus(35)) << d;
  }
}

TEST(Cyclotomic, GaloisIsMultiplicative) {
  long m = 24;
  auto a = CyclotomicElement::zeta_power(m, 5) + CyclotomicElement::rational(m, Rational(3, 2));
  auto b = CyclotomicElement::zeta_power(m, 7) - CyclotomicElement::zeta_power(m, 1);
  for (long k : {1L, 5L, 7L, 11L, 13L})
    EXPECT_TRUE(galois_apply(k, a * b) == galois_apply(k, a) * galois_apply(k, b));
  EXPECT_THROW(galois_apply(4, a), NotCoprime);
}

TEST(Cyclotomic, LiftUnit) {
  EXPECT_EQ(lift_unit(5, 9, 18), 5);
  EXPECT_THROW(lift_unit(3, 9, 18), NotCoprime);
  EXPECT_EQ(mod(lift_unit(4, 9, 18), 9), 4);
  EXPECT_EQ(gcd(lift_unit(4, 9, 18), 18), 1);
}
