#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pbeam/elements.hpp"
#include "pbeam/mesh.hpp"

namespace pbeam {

/// Continuous Lagrange space over a mesh with both endpoint dofs eliminated.
///
/// Global dofs are numbered left to right, so element k touches global dofs
/// k*degree .. k*degree + degree. Free dof j corresponds to global dof j + 1.
class FemSpace {
 public:
  FemSpace(Mesh1D mesh, int degree) : mesh_(std::move(mesh)), basis_(degree) {
    const auto d = static_cast<std::size_t>(degree);
    n_total_ = mesh_.n_elements() * d + 1;
    coords_.resize(n_total_);
    for (std::size_t k = 0; k < mesh_.n_elements(); ++k) {
      auto [lo, hi] = mesh_.element_interval(k);
      for (std::size_t i = 0; i < d; ++i) coords_[k * d + i] = lo + (hi - lo) * basis_.nodes()[i];
    }
    coords_.back() = mesh_.b();
  }

  [[nodiscard]] const Mesh1D& mesh() const noexcept { return mesh_; }
  [[nodiscard]] const ReferenceBasis& basis() const noexcept { return basis_; }
  [[nodiscard]] int degree() const noexcept { return basis_.degree(); }
  [[nodiscard]] std::size_t n_dofs_total() const noexcept { return n_total_; }
  [[nodiscard]] std::size_t n_dofs_free() const noexcept { return n_total_ - 2; }
  [[nodiscard]] std::span<const double> dof_coords() const noexcept { return coords_; }

  [[nodiscard]] std::size_t global_dof(std::size_t element, std::size_t local) const noexcept {
    return element * static_cast<std::size_t>(degree()) + local;
  }

  /// Free index of a global dof, or nullopt for the two boundary dofs.
  [[nodiscard]] std::optional<std::size_t> free_index(std::size_t global) const noexcept {
    if (global == 0 || global + 1 >= n_total_) return std::nullopt;
    return global - 1;
  }

 private:
  Mesh1D mesh_;
  ReferenceBasis basis_;
  std::size_t n_total_{};
  std::vector<double> coords_;
};

using SpacePtr = std::shared_ptr<const FemSpace>;

[[nodiscard]] inline SpacePtr build_space(Mesh1D mesh, int degree) {
  return std::make_shared<const FemSpace>(std::move(mesh), degree);
}

/// Finite element function stored by its free coefficients; zero at both endpoints.
class FemFunction {
 public:
  FemFunction(SpacePtr space, std::vector<double> coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
    if (!space_) throw std::invalid_argument("FemFunction requires a space");
    if (coeffs_.size() != space_->n_dofs_free()) {
      throw DimensionMismatch("coefficient count " + std::to_string(coeffs_.size()) + " does not match " +
                              std::to_string(space_->n_dofs_free()) + " free dofs");
    }
  }

  explicit FemFunction(SpacePtr space) : FemFunction(space, std::vector<double>(space ? space->n_dofs_free() : 0)) {}

  [[nodiscard]] const FemSpace& space() const noexcept { return *space_; }
  [[nodiscard]] const SpacePtr& space_ptr() const noexcept { return space_; }
  [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }

  /// Coefficient of a global dof (zero on the boundary).
  [[nodiscard]] double global_coeff(std::size_t global) const noexcept {
    auto j = space_->free_index(global);
    return j ? coeffs_[*j] : 0.0;
  }

  /// Gathers the local coefficients of element k.
  void element_coeffs(std::size_t k, std::span<double> out) const noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = global_coeff(space_->global_dof(k, i));
  }

  [[nodiscard]] double eval(double x) const { return eval_impl(x, false); }
  [[nodiscard]] double eval_deriv(double x) const { return eval_impl(x, true); }

 private:
  double eval_impl(double x, bool deriv) const {
    const auto k = space_->mesh().locate(x);
    auto [lo, hi] = space_->mesh().element_interval(k);
    const auto& basis = space_->basis();
    std::vector<double> phi(basis.count());
    const double t = (x - lo) / (hi - lo);
    if (deriv) {
      basis.eval_deriv<double>(t, phi);
    } else {
      basis.eval<double>(t, phi);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) s += global_coeff(space_->global_dof(k, i)) * phi[i];
    return deriv ? s / (hi - lo) : s;
  }

  SpacePtr space_;
  std::vector<double> coeffs_;
};

/// Nodal interpolant at the interior dof coordinates; boundary values of g are ignored.
template <typename Fn>
[[nodiscard]] FemFunction interpolate(const SpacePtr& space, Fn&& g) {
  std::vector<double> c(space->n_dofs_free());
  const auto coords = space->dof_coords();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = g(coords[j + 1]);
  return FemFunction(space, std::move(c));
}

}  // namespace pbeam
