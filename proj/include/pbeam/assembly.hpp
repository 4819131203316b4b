#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbeam/banded_matrix.hpp"
#include "pbeam/elements.hpp"
#include "pbeam/space.hpp"

namespace pbeam {

/// Smallest Gauss rule exact for the stiffness integrand (degree 2(d-1)).
[[nodiscard]] inline QuadratureRule stiffness_rule(const FemSpace& space) { return gauss_rule(space.degree()); }

/// Default rule for load vectors and the non-polynomial integrands of the second equation.
[[nodiscard]] inline int default_quad_points(int degree) { return std::max(degree + 1, 8); }

[[nodiscard]] inline QuadratureRule nonlinear_rule(const FemSpace& space) {
  return gauss_rule(default_quad_points(space.degree()));
}

/// sign(v) |v|^e, zero at v = 0 for any e > 0.
[[nodiscard]] inline double signed_pow(double v, double e) noexcept {
  if (v == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(v), e), v);
}

namespace detail {

/// Basis values and reference derivatives at every quadrature point.
template <typename T>
struct BasicTabulation {
  std::size_t n_basis;
  std::vector<T> phi;
  std::vector<T> dphi;

  BasicTabulation(const ReferenceBasis& basis, const QuadratureRule& quad)
      : n_basis(basis.count()), phi(quad.size() * n_basis), dphi(quad.size() * n_basis) {
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const T t = static_cast<T>(quad.points[q]);
      basis.eval<T>(t, std::span<T>(phi).subspan(q * n_basis, n_basis));
      basis.eval_deriv<T>(t, std::span<T>(dphi).subspan(q * n_basis, n_basis));
    }
  }

  [[nodiscard]] T value(std::size_t q, std::size_t i) const noexcept { return phi[q * n_basis + i]; }
  [[nodiscard]] T deriv(std::size_t q, std::size_t i) const noexcept { return dphi[q * n_basis + i]; }
};

using Tabulation = BasicTabulation<double>;

inline void check_order(const FemSpace& space, std::span<const std::size_t> order) {
  if (order.empty()) return;
  if (order.size() != space.mesh().n_elements()) throw std::invalid_argument("element order has wrong length");
  std::vector<bool> seen(order.size(), false);
  for (auto k : order) {
    if (k >= order.size() || seen[k]) throw std::invalid_argument("element order is not a permutation");
    seen[k] = true;
  }
}

/// Visits elements in natural order, or in the given permutation when non-empty.
template <typename Visit>
void for_each_element(const FemSpace& space, std::span<const std::size_t> order, Visit&& visit) {
  check_order(space, order);
  const std::size_t n = space.mesh().n_elements();
  for (std::size_t idx = 0; idx < n; ++idx) visit(order.empty() ? idx : order[idx]);
}

/// Element-local quadrature of sum_i w(x_q) phi_i phi_j style terms scattered into a vector.
template <typename Integrand>
DenseVector assemble_vector(const FemSpace& space, const QuadratureRule& quad, std::span<const std::size_t> order,
                            Integrand&& integrand) {
  const Tabulation tab(space.basis(), quad);
  DenseVector out(space.n_dofs_free(), 0.0);
  std::vector<double> local(tab.n_basis);
  for_each_element(space, order, [&](std::size_t k) {
    auto [lo, hi] = space.mesh().element_interval(k);
    const double h = hi - lo;
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const double g = integrand(k, q, lo + h * quad.points[q], tab) * quad.weights[q] * h;
      for (std::size_t i = 0; i < tab.n_basis; ++i) local[i] += g * tab.value(q, i);
    }
    for (std::size_t i = 0; i < tab.n_basis; ++i) {
      if (auto j = space.free_index(space.global_dof(k, i))) out[*j] += local[i];
    }
  });
  return out;
}

inline void check_exponent(double q) {
  if (!(q > 1.0)) throw std::invalid_argument("exponent q must exceed 1 (got " + std::to_string(q) + ")");
}

inline void check_same_space(const FemSpace& space, const FemFunction& fn) {
  if (&fn.space() != &space) throw std::invalid_argument("FEM function belongs to a different space");
}

/// Values of fn at the quadrature points of element k.
inline double value_at(const FemFunction& fn, const Tabulation& tab, std::size_t k, std::size_t q) {
  const auto& space = fn.space();
  double s = 0.0;
  for (std::size_t i = 0; i < tab.n_basis; ++i) s += fn.global_coeff(space.global_dof(k, i)) * tab.value(q, i);
  return s;
}

}  // namespace detail

/// K_ij = (phi_i', phi_j') over the free dofs, half bandwidth = degree, computed in scalar type T.
template <typename T>
[[nodiscard]] BasicBandedSymMatrix<T> assemble_stiffness_as(const FemSpace& space, const QuadratureRule& quad,
                                                            std::span<const std::size_t> element_order = {}) {
  const int d = space.degree();
  if (quad.exact_degree() < 2 * (d - 1)) {
    throw std::invalid_argument("quadrature with " + std::to_string(quad.size()) +
                                " points cannot integrate the degree-" + std::to_string(d) + " stiffness exactly");
  }
  const detail::BasicTabulation<T> tab(space.basis(), quad);
  const std::size_t nb = tab.n_basis;
  BasicBandedSymMatrix<T> K(space.n_dofs_free(), static_cast<std::size_t>(d));
  std::vector<T> local(nb * nb);
  detail::for_each_element(space, element_order, [&](std::size_t k) {
    auto [lo, hi] = space.mesh().element_interval(k);
    const T h = static_cast<T>(hi) - static_cast<T>(lo);
    std::fill(local.begin(), local.end(), T(0));
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const T w = static_cast<T>(quad.weights[q]) / h;
      for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t j = 0; j <= i; ++j) local[i * nb + j] += w * tab.deriv(q, i) * tab.deriv(q, j);
      }
    }
    for (std::size_t i = 0; i < nb; ++i) {
      const auto gi = space.free_index(space.global_dof(k, i));
      if (!gi) continue;
      for (std::size_t j = 0; j <= i; ++j) {
        const auto gj = space.free_index(space.global_dof(k, j));
        if (gj) K.add(*gi, *gj, local[i * nb + j]);
      }
    }
  });
  return K;
}

[[nodiscard]] inline BandedSymMatrix assemble_stiffness(const FemSpace& space, const QuadratureRule& quad,
                                                        std::span<const std::size_t> element_order = {}) {
  return assemble_stiffness_as<double>(space, quad, element_order);
}

[[nodiscard]] inline BandedSymMatrix assemble_stiffness(const FemSpace& space) {
  return assemble_stiffness(space, stiffness_rule(space));
}

/// Load vector with entries -(f, phi_j).
template <typename Fn>
[[nodiscard]] DenseVector assemble_load(const FemSpace& space, Fn&& f, const QuadratureRule& quad,
                                        std::span<const std::size_t> element_order = {}) {
  return detail::assemble_vector(space, quad, element_order,
                                 [&](std::size_t, std::size_t, double x, const detail::Tabulation&) { return -f(x); });
}

/// Right-hand side of the second equation: entries -(sign(v_h) |v_h|^(q-1), phi_j).
[[nodiscard]] inline DenseVector assemble_nonlinear_rhs(const FemSpace& space, const FemFunction& v_h, double q,
                                                        const QuadratureRule& quad,
                                                        std::span<const std::size_t> element_order = {}) {
  detail::check_exponent(q);
  detail::check_same_space(space, v_h);
  return detail::assemble_vector(space, quad, element_order,
                                 [&](std::size_t k, std::size_t qp, double, const detail::Tabulation& tab) {
                                   return -signed_pow(detail::value_at(v_h, tab, k, qp), q - 1.0);
                                 });
}

inline constexpr double kDefaultWeightClamp = 1e-12;

/// Weighted mass matrix M_ij = int |v_h|^(q-2) phi_i phi_j.
///
/// For q < 2 the weight is capped at clamp^(q-2) where |v_h| < clamp.
[[nodiscard]] inline BandedSymMatrix assemble_M(const FemSpace& space, const FemFunction& v_h, double q,
                                                const QuadratureRule& quad, double clamp = kDefaultWeightClamp) {
  detail::check_exponent(q);
  detail::check_same_space(space, v_h);
  if (!(clamp > 0.0)) throw std::invalid_argument("weight clamp must be positive");
  const detail::Tabulation tab(space.basis(), quad);
  const std::size_t nb = tab.n_basis;
  BandedSymMatrix M(space.n_dofs_free(), static_cast<std::size_t>(space.degree()));
  std::vector<double> local(nb * nb);
  for (std::size_t k = 0; k < space.mesh().n_elements(); ++k) {
    const double h = space.mesh().element_length(k);
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t qp = 0; qp < quad.size(); ++qp) {
      const double v = std::abs(detail::value_at(v_h, tab, k, qp));
      const double weight = (q < 2.0 && v < clamp) ? std::pow(clamp, q - 2.0) : std::pow(v, q - 2.0);
      const double w = weight * quad.weights[qp] * h;
      for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t j = 0; j <= i; ++j) local[i * nb + j] += w * tab.value(qp, i) * tab.value(qp, j);
      }
    }
    for (std::size_t i = 0; i < nb; ++i) {
      const auto gi = space.free_index(space.global_dof(k, i));
      if (!gi) continue;
      for (std::size_t j = 0; j <= i; ++j) {
        const auto gj = space.free_index(space.global_dof(k, j));
        if (gj) M.add(*gi, *gj, local[i * nb + j]);
      }
    }
  }
  return M;
}

}  // namespace pbeam
