#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pbeam/banded_matrix.hpp"
#include "pbeam/diagnostics.hpp"

namespace pbeam {

struct SolveResult {
  DenseVector x;
  /// ||K x - rhs||_inf of the returned x against the stored operator, accumulated in extended precision.
  double residual{};
  int refinement_steps{};
};

namespace detail {

template <typename T>
struct Accumulator {
  using type = long double;
};

#if defined(__SIZEOF_FLOAT128__) && !defined(PBEAM_NO_FLOAT128)
template <>
struct Accumulator<__float128> {
  using type = __float128;
};
#endif

}  // namespace detail

/// Banded Cholesky factor K = L L^T in double precision, no pivoting.
///
/// The operator is kept in its assembly scalar type T. Solves run the double
/// factor and then iterative refinement with residuals accumulated in at least
/// long double, so the returned solution is that of the stored operator to
/// about double rounding even when cond(K) * eps is large.
template <typename T>
class BasicCholeskyFactor {
 public:
  using Accum = typename detail::Accumulator<T>::type;

  explicit BasicCholeskyFactor(BasicBandedSymMatrix<T> K, int max_refinement = 4)
      : matrix_(std::move(K)), L_(matrix_.dim(), matrix_.half_bandwidth()), max_refinement_(max_refinement) {
    const std::size_t n = matrix_.dim();
    const std::size_t w = matrix_.half_bandwidth();
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jlo = j >= w ? j - w : 0;
      double d = static_cast<double>(matrix_.lower(j, j));
      for (std::size_t k = jlo; k < j; ++k) d -= L_.lower(j, k) * L_.lower(j, k);
      if (!(d > 0.0)) {
        throw NotPositiveDefinite("non-positive pivot " + std::to_string(d) + " at row " + std::to_string(j));
      }
      const double ljj = std::sqrt(d);
      L_.lower(j, j) = ljj;
      const std::size_t ihi = std::min(n - 1, j + w);
      for (std::size_t i = j + 1; i <= ihi; ++i) {
        const std::size_t ilo = i >= w ? i - w : 0;
        double s = static_cast<double>(matrix_.lower(i, j));
        for (std::size_t k = std::max(ilo, jlo); k < j; ++k) s -= L_.lower(i, k) * L_.lower(j, k);
        L_.lower(i, j) = s / ljj;
      }
    }
  }

  [[nodiscard]] std::size_t dim() const noexcept { return matrix_.dim(); }
  [[nodiscard]] std::size_t half_bandwidth() const noexcept { return matrix_.half_bandwidth(); }
  [[nodiscard]] const BandedSymMatrix& lower_factor() const noexcept { return L_; }
  [[nodiscard]] const BasicBandedSymMatrix<T>& matrix() const noexcept { return matrix_; }
  [[nodiscard]] int max_refinement() const noexcept { return max_refinement_; }

  [[nodiscard]] SolveResult solve(std::span<const double> rhs) const {
    const std::size_t n = dim();
    if (rhs.size() != n) {
      throw DimensionMismatch("right-hand side of length " + std::to_string(rhs.size()) + " for system of dimension " +
                              std::to_string(n));
    }
    SolveResult out{DenseVector(rhs.begin(), rhs.end()), 0.0, 0};
    substitute(out.x);
    DenseVector r(n);
    for (int step = 0; step < max_refinement_; ++step) {
      residual_vector(out.x, rhs, r);
      if (norm_inf(r) == 0.0) break;
      substitute(r);
      for (std::size_t i = 0; i < n; ++i) out.x[i] += r[i];
      ++out.refinement_steps;
      if (norm_inf(r) <= 2.0 * std::numeric_limits<double>::epsilon() * norm_inf(out.x)) break;
    }
    out.residual = residual_inf(out.x, rhs);
    return out;
  }

  /// rhs - K x, rounded to double.
  void residual_vector(std::span<const double> x, std::span<const double> rhs, std::span<double> out) const {
    const std::size_t n = dim();
    const std::size_t w = half_bandwidth();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= w ? i - w : 0;
      const std::size_t hi = std::min(n - 1, i + w);
      Accum r = static_cast<Accum>(rhs[i]);
      for (std::size_t j = lo; j <= hi; ++j) r -= static_cast<Accum>(matrix_(i, j)) * static_cast<Accum>(x[j]);
      out[i] = static_cast<double>(r);
    }
  }

  [[nodiscard]] double residual_inf(std::span<const double> x, std::span<const double> rhs) const {
    DenseVector r(dim());
    residual_vector(x, rhs, r);
    return norm_inf(r);
  }

 private:
  // In-place forward and backward substitution with the double factor.
  void substitute(std::span<double> x) const {
    const std::size_t n = dim();
    const std::size_t w = half_bandwidth();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= w ? i - w : 0;
      double s = x[i];
      for (std::size_t k = lo; k < i; ++k) s -= L_.lower(i, k) * x[k];
      x[i] = s / L_.lower(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      const std::size_t hi = std::min(n - 1, ii + w);
      double s = x[ii];
      for (std::size_t k = ii + 1; k <= hi; ++k) s -= L_.lower(k, ii) * x[k];
      x[ii] = s / L_.lower(ii, ii);
    }
  }

  BasicBandedSymMatrix<T> matrix_;
  BandedSymMatrix L_;
  int max_refinement_;
};

using CholeskyFactor = BasicCholeskyFactor<double>;
using ExtendedCholeskyFactor = BasicCholeskyFactor<Extended>;

/// Plain factorization: forward/backward substitution only, no refinement.
[[nodiscard]] inline CholeskyFactor factor(BandedSymMatrix K) { return CholeskyFactor(std::move(K), 0); }

/// Factorization of an extended-precision operator with iterative refinement.
[[nodiscard]] inline ExtendedCholeskyFactor factor_refined(ExtendedBandedMatrix K, int max_refinement = 4) {
  return ExtendedCholeskyFactor(std::move(K), max_refinement);
}

template <typename T>
[[nodiscard]] SolveResult solve(const BasicCholeskyFactor<T>& f, std::span<const double> rhs) {
  return f.solve(rhs);
}

}  // namespace pbeam
