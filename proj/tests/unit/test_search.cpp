#include <gtest/gtest.h>

#include <random>

#include "sicg/errors.hpp"
#include "sicg/search.hpp"

using namespace sicg;
using cd = std::complex<double>;

TEST(Search, BasisVectorPotential) {
  std::vector<cd> e0{1.0, 0.0};
  EXPECT_NEAR(frame_potential(e0, 2), 1.0, 1e-15);
}

TEST(Search, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0, 1);
  double worst = 0;
  for (long d = 2; d <= 8; ++d)
    for (int trial = 0; trial < 15; ++trial) {
      std::vector<cd> psi(static_cast<size_t>(d));
      for (auto& z : psi) z = cd(g(rng), g(rng));
      std::vector<cd> grad;
      frame_potential(psi, d, &grad);
      const double h = 1e-6;
      for (size_t j = 0; j < psi.size(); ++j)
        for (int part = 0; part < 2; ++part) {
          auto plus = psi, minus = psi;
          cd step = part == 0 ? cd(h, 0) : cd(0, h);
          plus[j] += step;
          minus[j] -= step;
          double fd = (frame_potential(plus, d) - frame_potential(minus, d)) / (2 * h);
          double an = part == 0 ? grad[j].real() : grad[j].imag();
          worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
        }
    }
  EXPECT_LT(worst, 1e-6);
}

TEST(Search, EigenspacesSpanEverything) {
  PrecisionScope ps(30);
  for (long d : {4L, 7L, 9L}) {
    size_t total = 0;
    for (int b = 0; b < 3; ++b) total += symmetric_basis(f_z(d), d, b).size();
    EXPECT_EQ(total, static_cast<size_t>(d));
  }
}

TEST(Search, ProjectionIsEigenvector) {
  PrecisionScope ps(30);
  long d = 7;
  CVector psi;
  for (int i = 0; i < 7; ++i) psi.emplace_back(0.3 * i - 1.0, 0.1 * i * i);
  CMatrix u = symplectic_unitary(f_z(d), d);
  for (int b = 0; b < 3; ++b) {
    CVector v = project_symmetric(psi, f_z(d), d, b);
    CVector uv = mat_vec(u, v);
    Complex lambda = inner(v, uv);
    Real err = 0;
    for (size_t i = 0; i < v.size(); ++i) err = std::max(err, abs(uv[i] - lambda * v[i]));
    EXPECT_LT(err, ten_to_minus(25));
    // Already an eigenvector: unchanged.
    CVector again = project_symmetric(v, f_z(d), d, b);
    Real diff = 0;
    for (size_t i = 0; i < v.size(); ++i) diff = std::max(diff, abs(again[i] - v[i]));
    EXPECT_LT(diff, ten_to_minus(25));
  }
}

TEST(Search, ZeroProjectionThrows) {
  PrecisionScope ps(30);
  long d = 4;
  auto b0 = symmetric_basis(f_z(d), d, 0);
  ASSERT_FALSE(b0.empty());
  for (int b = 1; b < 3; ++b)
    if (!symmetric_basis(f_z(d), d, b).empty()) EXPECT_THROW(project_symmetric(b0[0], f_z(d), d, b), ZeroProjection);
}

TEST(Search, FindsFiducialsUpToEight) {
  PrecisionScope ps(40);
  for (long d = 2; d <= 8; ++d) {
    SearchConfig cfg;
    cfg.d = d;
    cfg.restarts = 8;
    auto r = find_fiducial(cfg);
    double target = static_cast<double>(d - 1) / (d + 1);
    EXPECT_LT(std::abs(r.coarse_value - target), 1e-10) << d;
    EXPECT_TRUE(verify_sic(r.fiducial, ten_to_minus(30)).pass) << d;
  }
}

TEST(Search, Deterministic) {
  PrecisionScope ps(40);
  SearchConfig cfg;
  cfg.d = 5;
  cfg.restarts = 4;
  cfg.threads = 1;
  auto a = find_fiducial(cfg);
  cfg.threads = 4;
  auto b = find_fiducial(cfg);
  EXPECT_EQ(max_abs_diff(a.fiducial.pi, b.fiducial.pi), Real(0));
}
