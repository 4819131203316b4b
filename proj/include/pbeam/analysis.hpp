#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pbeam/assembly.hpp"
#include "pbeam/manufactured.hpp"
#include "pbeam/solver.hpp"
#include "pbeam/space.hpp"

namespace pbeam {

namespace detail {

template <typename Exact, bool Derivative>
double quadrature_error(const FemFunction& fn, Exact&& exact, int quad_points) {
  const auto& space = fn.space();
  const auto quad = gauss_rule(quad_points);
  const Tabulation tab(space.basis(), quad);
  double sum = 0.0;
  for (std::size_t k = 0; k < space.mesh().n_elements(); ++k) {
    auto [lo, hi] = space.mesh().element_interval(k);
    const double h = hi - lo;
    double local = 0.0;
    for (std::size_t qp = 0; qp < quad.size(); ++qp) {
      double s = 0.0;
      for (std::size_t i = 0; i < tab.n_basis; ++i) {
        const double c = fn.global_coeff(space.global_dof(k, i));
        s += c * (Derivative ? tab.deriv(qp, i) : tab.value(qp, i));
      }
      if constexpr (Derivative) s /= h;
      const double e = exact(lo + h * quad.points[qp]) - s;
      local += quad.weights[qp] * e * e;
    }
    sum += local * h;
  }
  return std::sqrt(sum);
}

}  // namespace detail

/// ||exact - fn||_L2 by element-wise Gauss quadrature.
template <typename Exact>
[[nodiscard]] double l2_error(const FemFunction& fn, Exact&& exact, int quad_points) {
  return detail::quadrature_error<Exact, false>(fn, std::forward<Exact>(exact), quad_points);
}

/// ||exact' - fn'||_L2.
template <typename Exact>
[[nodiscard]] double h1_semi_error(const FemFunction& fn, Exact&& exact_prime, int quad_points) {
  return detail::quadrature_error<Exact, true>(fn, std::forward<Exact>(exact_prime), quad_points);
}

/// log(e_coarse/e_fine) / log(h_coarse/h_fine); nullopt when either error is not positive.
[[nodiscard]] inline std::optional<double> eoc(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return std::nullopt;
  if (!(h_coarse > 0.0) || !(h_fine > 0.0) || !(h_fine < h_coarse)) {
    throw std::invalid_argument("eoc requires 0 < h_fine < h_coarse");
  }
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

enum class Quantity : std::size_t { u_l2 = 0, v_l2 = 1, u_h1 = 2, v_h1 = 3 };

inline constexpr std::array<const char*, 4> kQuantityNames{"u_l2", "v_l2", "u_h1", "v_h1"};

struct ErrorReport {
  std::size_t n_elements{};
  double h{};
  double err_u_l2{};
  double err_v_l2{};
  double err_u_h1{};
  double err_v_h1{};
  double residual_v{};
  double residual_u{};

  [[nodiscard]] double error(Quantity qty) const noexcept {
    switch (qty) {
      case Quantity::u_l2: return err_u_l2;
      case Quantity::v_l2: return err_v_l2;
      case Quantity::u_h1: return err_u_h1;
      case Quantity::v_h1: return err_v_h1;
    }
    return 0.0;
  }
};

using EocRow = std::array<std::optional<double>, 4>;

/// Rows ordered by decreasing h; eoc[0] is empty, eoc[k] compares rows k-1 and k.
struct ConvergenceTable {
  double p{};
  int degree{};
  std::string label;
  std::vector<ErrorReport> rows;
  std::vector<EocRow> eoc;

  [[nodiscard]] std::optional<double> final_eoc(Quantity qty) const {
    if (eoc.empty()) return std::nullopt;
    return eoc.back()[static_cast<std::size_t>(qty)];
  }
};

struct ConvergenceOptions {
  int quad_points{0};  // solver rule; 0 selects the default
  bool parallel{false};
  /// Errors below this fraction of the exact function's norm count as exact reproduction.
  double exact_floor_rel{1e-11};
};

/// Error report for one solve against an exact pair; error quadrature uses twice the solver points.
[[nodiscard]] inline ErrorReport measure_errors(const MixedSolution& sol, const ExactPair& exact, int solver_points) {
  const int qp = std::min(2 * solver_points, kMaxGaussPoints);
  ErrorReport r;
  r.n_elements = sol.u_h.space().mesh().n_elements();
  r.h = sol.u_h.space().mesh().h_max();
  r.err_u_l2 = l2_error(sol.u_h, exact.u, qp);
  r.err_v_l2 = l2_error(sol.v_h, exact.v, qp);
  r.err_u_h1 = h1_semi_error(sol.u_h, exact.u_prime, qp);
  r.err_v_h1 = h1_semi_error(sol.v_h, exact.v_prime, qp);
  r.residual_u = sol.residual_u;
  r.residual_v = sol.residual_v;
  return r;
}

namespace detail {

inline double exact_l2_norm(const ScalarFunction& g, double a, double b, std::size_t n = 1000) {
  const auto quad = gauss_rule(10);
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t qp = 0; qp < quad.size(); ++qp) {
      const double gx = g(a + h * (static_cast<double>(k) + quad.points[qp]));
      s += quad.weights[qp] * h * gx * gx;
    }
  }
  return std::sqrt(s);
}

}  // namespace detail

/// Solves on each mesh of n_list and tabulates errors with pairwise EOC.
///
/// An EOC cell is left empty when both errors sit below exact_floor_rel times
/// the norm of the exact quantity (the exact solution lies in the FE space).
[[nodiscard]] inline ConvergenceTable run_convergence(const ExactPair& exact, int degree,
                                                      const std::vector<std::size_t>& n_list,
                                                      const ConvergenceOptions& opts = {}) {
  if (n_list.size() < 2) throw std::invalid_argument("convergence study needs at least two meshes");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) throw std::invalid_argument("mesh sizes must be strictly increasing");
  }
  if (n_list.front() == 0) throw std::invalid_argument("mesh sizes must be positive");
  if (auto rep = check_consistency(exact); !rep.passed) {
    throw std::runtime_error("manufactured solution " + exact.label + " failed consistency: " + rep.describe());
  }

  auto run_one = [&](std::size_t n) {
    ProblemConfig cfg;
    cfg.p = exact.p;
    cfg.source = exact.f;
    cfg.a = exact.a;
    cfg.b = exact.b;
    cfg.n_elements = n;
    cfg.degree = degree;
    cfg.quad_points = opts.quad_points;
    const auto sol = solve_mixed(cfg);
    return measure_errors(sol, exact, cfg.effective_quad_points());
  };

  ConvergenceTable table;
  table.p = exact.p;
  table.degree = degree;
  table.label = exact.label;
  table.rows.reserve(n_list.size());
  if (opts.parallel) {
    std::vector<std::future<ErrorReport>> jobs;
    jobs.reserve(n_list.size());
    for (auto n : n_list) jobs.push_back(std::async(std::launch::async, run_one, n));
    for (auto& j : jobs) table.rows.push_back(j.get());
  } else {
    for (auto n : n_list) table.rows.push_back(run_one(n));
  }

  const std::array<double, 4> scale{
      detail::exact_l2_norm(exact.u, exact.a, exact.b), detail::exact_l2_norm(exact.v, exact.a, exact.b),
      detail::exact_l2_norm(exact.u_prime, exact.a, exact.b), detail::exact_l2_norm(exact.v_prime, exact.a, exact.b)};

  table.eoc.assign(table.rows.size(), EocRow{});
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    const auto& c = table.rows[k - 1];
    const auto& f = table.rows[k];
    for (std::size_t qi = 0; qi < 4; ++qi) {
      const auto qty = static_cast<Quantity>(qi);
      const double floor = opts.exact_floor_rel * scale[qi];
      if (c.error(qty) <= floor && f.error(qty) <= floor) continue;
      table.eoc[k][qi] = eoc(c.error(qty), f.error(qty), c.h, f.h);
    }
  }
  return table;
}

/// Convenience overload building the exact pair from a family.
[[nodiscard]] inline ConvergenceTable run_convergence(double p, const ExactFamily& family, int degree,
                                                      const std::vector<std::size_t>& n_list,
                                                      const ConvergenceOptions& opts = {}) {
  return run_convergence(family(p), degree, n_list, opts);
}

}  // namespace pbeam
