#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "pbeam/solver.hpp"

using namespace pbeam;

namespace {

ProblemConfig constant_source(double p, double alpha, std::size_t n, int degree) {
  ProblemConfig c;
  c.p = p;
  c.source = [alpha](double) { return alpha; };
  c.n_elements = n;
  c.degree = degree;
  return c;
}

double u_p15(double x) { return (x - x * x * x * x * (2 * x * x - 6 * x + 5)) / 240.0; }

}  // namespace

TEST(Solver, ConjugateExponent) {
  EXPECT_DOUBLE_EQ(conjugate_exponent(1.5), 3.0);
  EXPECT_DOUBLE_EQ(conjugate_exponent(2.0), 2.0);
  EXPECT_DOUBLE_EQ(conjugate_exponent(3.0), 1.5);
  EXPECT_THROW((void)conjugate_exponent(1.0), std::invalid_argument);
  EXPECT_THROW((void)conjugate_exponent(0.5), std::invalid_argument);
}

TEST(Solver, TwoElementHandSolution) {
  const auto sol = solve_mixed(constant_source(1.5, 1.0, 2, 1));
  EXPECT_EQ(sol.v_h.coeffs()[0], -0.125);
  EXPECT_EQ(sol.v_h.eval(0.5), -0.125);
}

TEST(Solver, LinearElementsNodalExactnessForV) {
  // For v'' = 1 in 1D, linear elements interpolate v exactly at the nodes.
  const auto sol = solve_mixed(constant_source(1.5, 1.0, 10, 1));
  for (int i = 1; i < 10; ++i) {
    const double x = i / 10.0;
    EXPECT_NEAR(sol.v_h.eval(x), 0.5 * x * (x - 1), 1e-15);
  }
  // u_h is only O(h^2) accurate at the nodes: check size and the refinement ratio.
  const double e10 = std::abs(sol.u_h.eval(0.5) - u_p15(0.5));
  const double e20 = std::abs(solve_mixed(constant_source(1.5, 1.0, 20, 1)).u_h.eval(0.5) - u_p15(0.5));
  EXPECT_LT(e10, 3e-5);
  EXPECT_NEAR(e10 / e20, 4.0, 0.2);
}

TEST(Solver, ZeroSourceGivesZeroSolution) {
  const auto sol = solve_mixed(constant_source(2.5, 0.0, 12, 2));
  for (double c : sol.v_h.coeffs()) EXPECT_EQ(c, 0.0);
  for (double c : sol.u_h.coeffs()) EXPECT_EQ(c, 0.0);
}

TEST(Solver, ResidualsAreTiny) {
  for (int d = 1; d <= 3; ++d) {
    for (std::size_t n : {10u, 1000u}) {
      auto cfg = constant_source(1.5, 1.0, n, d);
      const auto [sol, sys] = solve_mixed_with_system(cfg);
      EXPECT_LE(sol.residual_v, 1e-12);
      EXPECT_LE(sol.residual_u, 1e-12);
      std::vector<double> x(sol.v_h.coeffs().begin(), sol.v_h.coeffs().end());
      EXPECT_NEAR(sys.stiffness.residual_inf(x, sys.load), sol.residual_v, 1e-18);
    }
  }
}

TEST(Solver, PlainPrecisionAgreesWithRefined) {
  auto cfg = constant_source(1.5, 1.0, 50, 2);
  const auto r = solve_mixed(cfg);
  cfg.precision = SolverPrecision::plain;
  const auto p = solve_mixed(cfg);
  for (std::size_t i = 0; i < r.u_h.coeffs().size(); ++i) EXPECT_NEAR(p.u_h.coeffs()[i], r.u_h.coeffs()[i], 1e-12);
}

TEST(Solver, ScalingLaw) {
  for (double p : {1.5, 2.0, 3.0}) {
    const double q = conjugate_exponent(p);
    const auto base = solve_mixed(constant_source(p, 1.0, 40, 2));
    for (double alpha : {2.0, 10.0}) {
      const auto s = solve_mixed(constant_source(p, alpha, 40, 2));
      const double au = std::pow(alpha, q - 1.0);
      for (std::size_t i = 0; i < base.v_h.coeffs().size(); ++i) {
        EXPECT_NEAR(s.v_h.coeffs()[i], alpha * base.v_h.coeffs()[i], 1e-13 * alpha * std::abs(base.v_h.coeffs()[i]));
        EXPECT_NEAR(s.u_h.coeffs()[i], au * base.u_h.coeffs()[i], 1e-10 * au * std::abs(base.u_h.coeffs()[i]));
      }
    }
  }
}

TEST(Solver, ElementOrderIsBitIdentical) {
  const std::size_t n = 64;
  ProblemConfig cfg;
  cfg.p = 1.7;
  cfg.source = [](double x) { return std::cos(4 * x) - 0.3; };
  cfg.n_elements = n;
  cfg.degree = 3;
  std::vector<std::size_t> order(n);
  std::iota(order.rbegin(), order.rend(), 0);
  const auto a = solve_mixed_with_system(cfg).first;
  const auto b = solve_mixed_with_system(cfg, order).first;
  for (std::size_t i = 0; i < a.u_h.coeffs().size(); ++i) {
    EXPECT_EQ(a.u_h.coeffs()[i], b.u_h.coeffs()[i]);
    EXPECT_EQ(a.v_h.coeffs()[i], b.v_h.coeffs()[i]);
  }
}

TEST(Stability, RatioStableUnderRefinement) {
  // ||v||_H1 / ||f|| for f = 1 tends to sqrt(1/120 + 1/12).
  const double limit = std::sqrt(1.0 / 120 + 1.0 / 12);
  for (std::size_t n : {10u, 100u, 1000u}) {
    const auto cfg = constant_source(1.5, 1.0, n, 1);
    const auto r = stability_check(solve_mixed(cfg), cfg);
    EXPECT_NEAR(r.ratio_v, limit, 0.05 * limit) << n;
    EXPECT_NEAR(r.f_l2, 1.0, 1e-13);
    EXPECT_GT(r.ratio_u, 0.0);
  }
}

TEST(Stability, DoublingSourceDoublesV) {
  const auto c1 = constant_source(2.0, 1.0, 20, 1);
  const auto c2 = constant_source(2.0, 2.0, 20, 1);
  const auto r1 = stability_check(solve_mixed(c1), c1);
  const auto r2 = stability_check(solve_mixed(c2), c2);
  EXPECT_NEAR(r2.v_h1, 2 * r1.v_h1, 1e-13);
  EXPECT_NEAR(r2.ratio_u, r1.ratio_u, 1e-12);
}

TEST(Solver, ValidationErrors) {
  auto cfg = constant_source(1.5, 1.0, 10, 1);
  cfg.p = 1.0;
  EXPECT_THROW((void)solve_mixed(cfg), std::invalid_argument);
  cfg = constant_source(1.5, 1.0, 0, 1);
  EXPECT_THROW((void)solve_mixed(cfg), InvalidMesh);
  cfg = constant_source(1.5, 1.0, 10, 1);
  cfg.source = nullptr;
  EXPECT_THROW((void)solve_mixed(cfg), std::invalid_argument);
  cfg = constant_source(1.5, 1.0, 10, 1);
  cfg.quad_points = 30;
  EXPECT_THROW((void)solve_mixed(cfg), std::invalid_argument);
}
