#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "pbeam/assembly.hpp"
#include "pbeam/linalg.hpp"
#include "support/oracles.hpp"

using namespace pbeam;

TEST(Stiffness, LinearElementsAreTridiagonalOneOverH) {
  const auto s = build_space(build_uniform(0, 1, 10), 1);
  const auto K = assemble_stiffness(*s);
  ASSERT_EQ(K.dim(), 9u);
  EXPECT_EQ(K.half_bandwidth(), 1u);
  for (std::size_t i = 0; i < K.dim(); ++i) {
    EXPECT_NEAR(K(i, i), 20.0, 1e-12);
    if (i + 1 < K.dim()) { EXPECT_NEAR(K(i, i + 1), -10.0, 1e-12); }
  }
}

TEST(Stiffness, TwoElementsGiveFour) {
  const auto K = assemble_stiffness(*build_space(build_uniform(0, 1, 2), 1));
  ASSERT_EQ(K.dim(), 1u);
  EXPECT_DOUBLE_EQ(K(0, 0), 4.0);
}

TEST(Stiffness, MatchesGlobalOracleForQuadratics) {
  // Entries (phi_i', phi_j') from global product-form basis and Simpson.
  const std::size_t n = 3;
  const double h = 1.0 / n;
  const auto s = build_space(build_uniform(0, 1, n), 2);
  const auto K = assemble_stiffness(*s);
  const auto xs = s->dof_coords();
  auto dphi = [&](std::size_t g, double x) { return oracle::global_lagrange(x, xs[g], 2, h, true); };
  for (std::size_t i = 0; i < K.dim(); ++i) {
    for (std::size_t j = 0; j <= i && i - j <= 2; ++j) {
      double ref = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        // stay strictly inside the element so the one-sided piece is used
        const double lo = k * h + 1e-12;
        const double hi = (k + 1) * h - 1e-12;
        ref += oracle::simpson([&](double x) { return dphi(i + 1, x) * dphi(j + 1, x); }, lo, hi, 400);
      }
      EXPECT_NEAR(K(i, j), ref, 1e-9) << i << "," << j;
    }
  }
}

TEST(Stiffness, PositiveDefiniteForEveryDegree) {
  for (int d = 1; d <= 4; ++d) {
    const auto K = assemble_stiffness(*build_space(build_uniform(0, 1, 7), d));
    EXPECT_NO_THROW((void)factor(K));
    std::mt19937 rng(d);
    std::normal_distribution<double> g;
    for (int t = 0; t < 10; ++t) {
      std::vector<double> x(K.dim());
      for (auto& v : x) v = g(rng);
      const auto y = pbeam::apply(K, x);
      EXPECT_GT(std::inner_product(x.begin(), x.end(), y.begin(), 0.0), 0.0);
    }
  }
}

TEST(Stiffness, RejectsUnderIntegration) {
  const auto s = build_space(build_uniform(0, 1, 4), 3);
  EXPECT_THROW((void)assemble_stiffness(*s, gauss_rule(2)), std::invalid_argument);
}

TEST(Stiffness, ApplyRowSums) {
  const auto K = assemble_stiffness(*build_space(build_uniform(0, 1, 10), 1));
  const auto y = pbeam::apply(K, std::vector<double>(9, 1.0));
  EXPECT_NEAR(y.front(), 10.0, 1e-12);
  EXPECT_NEAR(y.back(), 10.0, 1e-12);
  for (std::size_t i = 1; i + 1 < y.size(); ++i) EXPECT_NEAR(y[i], 0.0, 1e-12);
  EXPECT_THROW((void)pbeam::apply(K, std::vector<double>(3)), DimensionMismatch);
}

TEST(Load, ConstantSourceGivesMinusH) {
  const auto s = build_space(build_uniform(0, 1, 10), 1);
  const auto b = assemble_load(*s, [](double) { return 1.0; }, gauss_rule(2));
  for (double v : b) EXPECT_NEAR(v, -0.1, 1e-15);
}

TEST(Load, IsLinearInSource) {
  const auto s = build_space(build_uniform(0, 1, 9), 2);
  const auto rule = gauss_rule(8);
  auto f = [](double x) { return std::sin(3 * x); };
  auto g = [](double x) { return x * x - 0.2; };
  const auto bf = assemble_load(*s, f, rule);
  const auto bg = assemble_load(*s, g, rule);
  const auto bsum = assemble_load(*s, [&](double x) { return 2.5 * f(x) - g(x); }, rule);
  for (std::size_t i = 0; i < bf.size(); ++i) EXPECT_NEAR(bsum[i], 2.5 * bf[i] - bg[i], 1e-15);
}

TEST(NonlinearRhs, QuadraticExponentIsMassAction) {
  const auto s = build_space(build_uniform(0, 1, 8), 2);
  const auto v = interpolate(s, [](double x) { return std::sin(M_PI * x); });
  const auto rule = gauss_rule(8);
  const auto b = assemble_nonlinear_rhs(*s, v, 2.0, rule);
  const auto M = assemble_M(*s, v, 2.0, rule);
  const auto Mv = pbeam::apply(M, v.coeffs());
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(b[i], -Mv[i], 1e-15);
}

TEST(NonlinearRhs, HomogeneousOfDegreeQMinusOne) {
  const auto s = build_space(build_uniform(0, 1, 6), 3);
  const auto rule = gauss_rule(8);
  for (double q : {1.5, 3.0, 10.0 / 9.0}) {
    const auto v = interpolate(s, [](double x) { return x * (x - 1) * (x + 0.3); });
    std::vector<double> c(v.coeffs().begin(), v.coeffs().end());
    for (auto& x : c) x *= 3.0;
    const FemFunction v3(s, c);
    const auto b1 = assemble_nonlinear_rhs(*s, v, q, rule);
    const auto b3 = assemble_nonlinear_rhs(*s, v3, q, rule);
    const double a = std::pow(3.0, q - 1.0);
    for (std::size_t i = 0; i < b1.size(); ++i) EXPECT_NEAR(b3[i], a * b1[i], 1e-14 * a) << "q=" << q;
  }
}

TEST(NonlinearRhs, MatchesGlobalQuadratureOracle) {
  // v = x(x-1)/2 is interpolated exactly by quadratics; q = 3 gives integrand v^2 phi_j.
  const std::size_t n = 10;
  const double h = 1.0 / n;
  const auto s = build_space(build_uniform(0, 1, n), 2);
  auto vex = [](double x) { return 0.5 * x * (x - 1); };
  const auto v = interpolate(s, vex);
  const auto b = assemble_nonlinear_rhs(*s, v, 3.0, gauss_rule(8));
  const auto xs = s->dof_coords();
  for (std::size_t j = 0; j < b.size(); ++j) {
    double ref = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      ref += oracle::simpson(
          [&](double x) { return -signed_pow(vex(x), 2.0) * oracle::global_lagrange(x, xs[j + 1], 2, h); }, k * h,
          (k + 1) * h, 4000);
    }
    EXPECT_NEAR(b[j], ref, 1e-12 * std::abs(ref));
  }
}

TEST(MassMatrix, LinearElementsUnitWeight) {
  const auto s = build_space(build_uniform(0, 1, 10), 1);
  const auto v = interpolate(s, [](double x) { return x * (1 - x); });
  const auto M = assemble_M(*s, v, 2.0, gauss_rule(3));
  for (std::size_t i = 0; i < M.dim(); ++i) {
    EXPECT_NEAR(M(i, i), 2 * 0.1 / 3, 1e-15);
    if (i + 1 < M.dim()) { EXPECT_NEAR(M(i, i + 1), 0.1 / 6, 1e-15); }
  }
}

TEST(MassMatrix, ZeroFieldWithLargeExponentVanishes) {
  const auto s = build_space(build_uniform(0, 1, 5), 2);
  const FemFunction zero(s);
  const auto M = assemble_M(*s, zero, 3.0, gauss_rule(4));
  EXPECT_EQ(M.norm_inf(), 0.0);
}

TEST(MassMatrix, ClampBoundsWeightForSmallExponent) {
  const auto s = build_space(build_uniform(0, 1, 5), 1);
  const FemFunction zero(s);
  const double q = 1.5;
  const auto M = assemble_M(*s, zero, q, gauss_rule(3), 1e-4);
  EXPECT_NEAR(M(0, 0), std::pow(1e-4, q - 2.0) * 2 * 0.2 / 3, 1e-9);
  EXPECT_TRUE(std::isfinite(assemble_M(*s, zero, q, gauss_rule(3)).norm_inf()));
}

TEST(Assembly, ElementOrderDoesNotChangeBits) {
  const std::size_t n = 37;
  const auto s = build_space(build_uniform(0, 1, n), 3);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937(5));
  const auto rule = gauss_rule(8);
  auto f = [](double x) { return std::exp(x) * std::cos(5 * x); };
  const auto K0 = assemble_stiffness(*s, stiffness_rule(*s));
  const auto K1 = assemble_stiffness(*s, stiffness_rule(*s), order);
  EXPECT_EQ(K0.band_data().size(), K1.band_data().size());
  for (std::size_t i = 0; i < K0.band_data().size(); ++i) EXPECT_EQ(K0.band_data()[i], K1.band_data()[i]);
  EXPECT_EQ(assemble_load(*s, f, rule), assemble_load(*s, f, rule, order));
  const auto v = interpolate(s, f);
  EXPECT_EQ(assemble_nonlinear_rhs(*s, v, 1.7, rule), assemble_nonlinear_rhs(*s, v, 1.7, rule, order));
}

TEST(Assembly, RejectsBadOrderAndExponent) {
  const auto s = build_space(build_uniform(0, 1, 3), 1);
  const std::vector<std::size_t> dup{0, 0, 1};
  EXPECT_THROW((void)assemble_stiffness(*s, gauss_rule(1), dup), std::invalid_argument);
  const FemFunction v(s);
  EXPECT_THROW((void)assemble_nonlinear_rhs(*s, v, 1.0, gauss_rule(2)), std::invalid_argument);
  const auto other = build_space(build_uniform(0, 1, 3), 1);
  EXPECT_THROW((void)assemble_nonlinear_rhs(*other, v, 2.0, gauss_rule(2)), std::invalid_argument);
}
