#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pbeam/analysis.hpp"

using namespace pbeam;

TEST(Eoc, KnownRatios) {
  EXPECT_NEAR(eoc(1e-2, 2.5e-3, 0.1, 0.05).value(), 2.0, 1e-14);
  EXPECT_NEAR(eoc(1.0, 1e-3, 0.1, 0.01).value(), 3.0, 1e-14);
  EXPECT_FALSE(eoc(0.0, 1e-3, 0.1, 0.01).has_value());
  EXPECT_FALSE(eoc(1e-3, 0.0, 0.1, 0.01).has_value());
  EXPECT_THROW((void)eoc(1.0, 0.5, 0.01, 0.1), std::invalid_argument);
}

TEST(Errors, ZeroFunctionGivesNormOfExact) {
  const auto s = build_space(build_uniform(0, 1, 10), 1);
  const FemFunction zero(s);
  // int (x(x-1)/2)^2 = 1/120; int (x - 1/2)^2 = 1/12.
  EXPECT_NEAR(l2_error(zero, [](double x) { return 0.5 * x * (x - 1); }, 4), std::sqrt(1.0 / 120), 1e-15);
  EXPECT_NEAR(h1_semi_error(zero, [](double x) { return x - 0.5; }, 4), std::sqrt(1.0 / 12), 1e-15);
}

TEST(Errors, InterpolantOfSpaceMemberHasZeroError) {
  const auto s = build_space(build_uniform(0, 1, 7), 2);
  auto g = [](double x) { return x * (1 - x); };
  const auto fn = interpolate(s, g);
  EXPECT_LT(l2_error(fn, g, 6), 1e-15);
  EXPECT_LT(h1_semi_error(fn, [](double x) { return 1 - 2 * x; }, 6), 1e-14);
}

TEST(Errors, QuadratureSaturates) {
  const auto s = build_space(build_uniform(0, 1, 5), 1);
  const auto fn = interpolate(s, [](double x) { return std::sin(M_PI * x); });
  auto g = [](double x) { return std::sin(M_PI * x); };
  EXPECT_NEAR(l2_error(fn, g, 16), l2_error(fn, g, 20), 1e-14);
}

TEST(Convergence, TableShapeAndOrders) {
  const auto t = run_convergence(example1(1.5), 1, {8, 16, 32});
  ASSERT_EQ(t.rows.size(), 3u);
  ASSERT_EQ(t.eoc.size(), 3u);
  for (const auto& e : t.eoc[0]) EXPECT_FALSE(e.has_value());
  EXPECT_NEAR(t.final_eoc(Quantity::u_l2).value(), 2.0, 0.05);
  EXPECT_NEAR(t.final_eoc(Quantity::v_h1).value(), 1.0, 0.05);
  EXPECT_DOUBLE_EQ(t.rows[1].h, 1.0 / 16);
}

TEST(Convergence, ExactReproductionLeavesEocEmpty) {
  const auto t = run_convergence(example1(1.5), 2, {4, 8});
  EXPECT_LE(t.rows[1].err_v_l2, 1e-14);
  EXPECT_FALSE(t.final_eoc(Quantity::v_l2).has_value());
  EXPECT_TRUE(t.final_eoc(Quantity::u_l2).has_value());
}

TEST(Convergence, ParallelMatchesSequential) {
  ConvergenceOptions par;
  par.parallel = true;
  const auto a = run_convergence(example2(3.0), 2, {5, 10, 20});
  const auto b = run_convergence(example2(3.0), 2, {5, 10, 20}, par);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a.rows[k].err_u_l2, b.rows[k].err_u_l2);
    EXPECT_EQ(a.rows[k].err_v_h1, b.rows[k].err_v_h1);
  }
}

TEST(Convergence, RejectsBadMeshLists) {
  const auto e = example1(1.5);
  EXPECT_THROW((void)run_convergence(e, 1, {10}), std::invalid_argument);
  EXPECT_THROW((void)run_convergence(e, 1, {10, 10}), std::invalid_argument);
  EXPECT_THROW((void)run_convergence(e, 1, {0, 10}), std::invalid_argument);
}

TEST(Convergence, RejectsInconsistentExactPair) {
  auto e = example1(1.5);
  e.f = [](double) { return 2.0; };
  EXPECT_THROW((void)run_convergence(e, 1, {4, 8}), std::runtime_error);
}
