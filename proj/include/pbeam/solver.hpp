#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "pbeam/assembly.hpp"
#include "pbeam/linalg.hpp"
#include "pbeam/mesh.hpp"
#include "pbeam/space.hpp"

namespace pbeam {

using ScalarFunction = std::function<double(double)>;

/// Conjugate exponent q = p / (p - 1).
[[nodiscard]] inline double conjugate_exponent(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1 (got " + std::to_string(p) + ")");
  return p / (p - 1.0);
}

enum class SolverPrecision {
  /// Double-precision operator, one Cholesky substitution per solve.
  plain,
  /// Extended-precision operator with iterative refinement of the double factor.
  refined,
};

/// Input of one mixed solve. q is always derived from p.
struct ProblemConfig {
  double p{2.0};
  ScalarFunction source;
  double a{0.0};
  double b{1.0};
  std::size_t n_elements{10};
  int degree{1};
  /// Gauss points per element for the load vector and the nonlinear right-hand side; 0 selects the default.
  int quad_points{0};
  SolverPrecision precision{SolverPrecision::refined};

  [[nodiscard]] double q() const { return conjugate_exponent(p); }
  [[nodiscard]] int effective_quad_points() const { return quad_points > 0 ? quad_points : default_quad_points(degree); }

  void validate() const {
    (void)conjugate_exponent(p);
    if (!source) throw std::invalid_argument("problem needs a source term");
    if (degree < 1) throw std::invalid_argument("degree must be at least 1");
    if (n_elements == 0) throw InvalidMesh("need at least one element");
    if (!(a < b)) throw InvalidMesh("domain requires a < b");
    (void)gauss_rule(effective_quad_points());
  }
};

struct MixedSolution {
  FemFunction u_h;
  FemFunction v_h;
  double residual_v{};
  double residual_u{};
  std::chrono::duration<double> wall_time{};
};

/// Discrete vectors behind a MixedSolution, for residual and matrix-form checks.
struct MixedSystem {
  SpacePtr space;
  ExtendedCholeskyFactor stiffness;
  DenseVector load;            // entries -(f, phi_j)
  DenseVector nonlinear_rhs;   // entries -(sign(v_h)|v_h|^(q-1), phi_j)
};

namespace detail {

/// Solves K v = f, then K u = b(v_h) with one factorization of K.
inline std::pair<MixedSolution, MixedSystem> solve_mixed_full(const ProblemConfig& cfg,
                                                              std::span<const std::size_t> element_order = {}) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const double q = cfg.q();
  auto space = build_space(build_uniform(cfg.a, cfg.b, cfg.n_elements), cfg.degree);
  const auto quad = gauss_rule(cfg.effective_quad_points());

  auto K = cfg.precision == SolverPrecision::refined
               ? factor_refined(assemble_stiffness_as<Extended>(*space, stiffness_rule(*space), element_order))
               : factor_refined(ExtendedBandedMatrix::convert(
                                    assemble_stiffness(*space, stiffness_rule(*space), element_order)),
                                0);

  // First equation: reads only the source.
  auto load = assemble_load(*space, cfg.source, quad, element_order);
  auto v_sol = K.solve(load);
  FemFunction v_h(space, std::move(v_sol.x));

  // Second equation: reads only v_h and q.
  auto rhs = assemble_nonlinear_rhs(*space, v_h, q, quad, element_order);
  auto u_sol = K.solve(rhs);
  FemFunction u_h(space, std::move(u_sol.x));

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  MixedSolution sol{std::move(u_h), std::move(v_h), v_sol.residual, u_sol.residual, elapsed};
  MixedSystem sys{std::move(space), std::move(K), std::move(load), std::move(rhs)};
  return {std::move(sol), std::move(sys)};
}

}  // namespace detail

[[nodiscard]] inline MixedSolution solve_mixed(const ProblemConfig& cfg) {
  return detail::solve_mixed_full(cfg).first;
}

/// Same as solve_mixed, also returning the assembled system.
[[nodiscard]] inline std::pair<MixedSolution, MixedSystem> solve_mixed_with_system(
    const ProblemConfig& cfg, std::span<const std::size_t> element_order = {}) {
  return detail::solve_mixed_full(cfg, element_order);
}

struct StabilityReport {
  double v_h1{};
  double u_h1{};
  double f_l2{};
  /// ||v_h||_H1 / ||f||_L2, zero when f vanishes.
  double ratio_v{};
  /// ||u_h||_H1 / ||f||_L2^(q-1), zero when f vanishes.
  double ratio_u{};
};

namespace detail {

struct H1Norms {
  double l2_sq{};
  double semi_sq{};
};

inline H1Norms h1_norms(const FemFunction& fn, const QuadratureRule& quad) {
  const auto& space = fn.space();
  const Tabulation tab(space.basis(), quad);
  H1Norms out;
  for (std::size_t k = 0; k < space.mesh().n_elements(); ++k) {
    const double h = space.mesh().element_length(k);
    for (std::size_t qp = 0; qp < quad.size(); ++qp) {
      double val = 0.0;
      double der = 0.0;
      for (std::size_t i = 0; i < tab.n_basis; ++i) {
        const double c = fn.global_coeff(space.global_dof(k, i));
        val += c * tab.value(qp, i);
        der += c * tab.deriv(qp, i);
      }
      der /= h;
      out.l2_sq += quad.weights[qp] * h * val * val;
      out.semi_sq += quad.weights[qp] * h * der * der;
    }
  }
  return out;
}

}  // namespace detail

/// Norms entering the discrete stability bounds ||v_h|| <= C ||f|| and ||u_h|| <= C ||f||^(q-1).
[[nodiscard]] inline StabilityReport stability_check(const MixedSolution& sol, const ProblemConfig& cfg) {
  const auto& space = sol.v_h.space();
  const auto quad = gauss_rule(std::min(2 * cfg.effective_quad_points(), kMaxGaussPoints));
  const auto nv = detail::h1_norms(sol.v_h, quad);
  const auto nu = detail::h1_norms(sol.u_h, quad);
  double f_sq = 0.0;
  for (std::size_t k = 0; k < space.mesh().n_elements(); ++k) {
    auto [lo, hi] = space.mesh().element_interval(k);
    for (std::size_t qp = 0; qp < quad.size(); ++qp) {
      const double fx = cfg.source(lo + (hi - lo) * quad.points[qp]);
      f_sq += quad.weights[qp] * (hi - lo) * fx * fx;
    }
  }
  StabilityReport r;
  r.v_h1 = std::sqrt(nv.l2_sq + nv.semi_sq);
  r.u_h1 = std::sqrt(nu.l2_sq + nu.semi_sq);
  r.f_l2 = std::sqrt(f_sq);
  if (r.f_l2 > 0.0) {
    r.ratio_v = r.v_h1 / r.f_l2;
    r.ratio_u = r.u_h1 / std::pow(r.f_l2, cfg.q() - 1.0);
  }
  return r;
}

}  // namespace pbeam
