#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pbeam/diagnostics.hpp"

namespace pbeam {

using DenseVector = std::vector<double>;

/// Extended-precision scalar used for the stiffness operator and residuals.
#if defined(__SIZEOF_FLOAT128__) && !defined(PBEAM_NO_FLOAT128)
using Extended = __float128;
#else
using Extended = long double;
#endif

template <typename T>
[[nodiscard]] constexpr T abs_value(T v) noexcept {
  return v < T(0) ? -v : v;
}

/// Symmetric banded matrix; only the lower band is stored.
///
/// Row i keeps entries (i, i - hbw) .. (i, i) in a contiguous slot of length
/// hbw + 1, with the diagonal last.
template <typename T>
class BasicBandedSymMatrix {
 public:
  using value_type = T;

  BasicBandedSymMatrix(std::size_t dim, std::size_t half_bandwidth)
      : dim_(dim), hbw_(half_bandwidth), data_(dim * (half_bandwidth + 1), T(0)) {}

  /// Entry-wise conversion from another scalar type.
  template <typename U>
  [[nodiscard]] static BasicBandedSymMatrix convert(const BasicBandedSymMatrix<U>& other) {
    BasicBandedSymMatrix out(other.dim(), other.half_bandwidth());
    const auto src = other.band_data();
    for (std::size_t i = 0; i < src.size(); ++i) out.data_[i] = static_cast<T>(src[i]);
    return out;
  }

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t half_bandwidth() const noexcept { return hbw_; }

  [[nodiscard]] bool in_band(std::size_t i, std::size_t j) const noexcept {
    return (i >= j ? i - j : j - i) <= hbw_;
  }

  /// Symmetric access; zero outside the band.
  [[nodiscard]] T operator()(std::size_t i, std::size_t j) const noexcept {
    if (i < j) std::swap(i, j);
    if (i - j > hbw_) return T(0);
    return data_[slot(i, j)];
  }

  /// Stored entry (i, j); requires i >= j and i - j <= hbw.
  [[nodiscard]] T& lower(std::size_t i, std::size_t j) noexcept { return data_[slot(i, j)]; }
  [[nodiscard]] T lower(std::size_t i, std::size_t j) const noexcept { return data_[slot(i, j)]; }

  /// Adds to entry (i, j) and, implicitly, (j, i).
  void add(std::size_t i, std::size_t j, T value) {
    if (i < j) std::swap(i, j);
    if (i - j > hbw_) throw std::out_of_range("entry outside matrix band");
    data_[slot(i, j)] += value;
  }

  [[nodiscard]] std::span<const T> band_data() const noexcept { return data_; }

  /// Maximum absolute row sum.
  [[nodiscard]] double norm_inf() const noexcept {
    double best = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      T row = T(0);
      const std::size_t lo = i >= hbw_ ? i - hbw_ : 0;
      const std::size_t hi = std::min(dim_ - 1, i + hbw_);
      for (std::size_t j = lo; j <= hi; ++j) row += abs_value((*this)(i, j));
      best = std::max(best, static_cast<double>(row));
    }
    return best;
  }

 private:
  [[nodiscard]] std::size_t slot(std::size_t i, std::size_t j) const noexcept {
    return i * (hbw_ + 1) + (hbw_ - (i - j));
  }

  std::size_t dim_;
  std::size_t hbw_;
  std::vector<T> data_;
};

using BandedSymMatrix = BasicBandedSymMatrix<double>;
using ExtendedBandedMatrix = BasicBandedSymMatrix<Extended>;

/// y = A x within the band, accumulated in the matrix scalar type and rounded to double.
template <typename T>
[[nodiscard]] DenseVector apply(const BasicBandedSymMatrix<T>& m, std::span<const double> x) {
  if (x.size() != m.dim()) {
    throw DimensionMismatch("matrix of dimension " + std::to_string(m.dim()) + " applied to vector of length " +
                            std::to_string(x.size()));
  }
  const std::size_t n = m.dim();
  const std::size_t w = m.half_bandwidth();
  std::vector<T> y(n, T(0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= w ? i - w : 0;
    T lower_part = T(0);
    for (std::size_t j = lo; j < i; ++j) {
      const T a = m.lower(i, j);
      lower_part += a * static_cast<T>(x[j]);
      y[j] += a * static_cast<T>(x[i]);
    }
    y[i] += lower_part + m.lower(i, i) * static_cast<T>(x[i]);
  }
  return DenseVector(y.begin(), y.end());
}

[[nodiscard]] inline double norm_inf(std::span<const double> x) noexcept {
  double best = 0.0;
  for (double v : x) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace pbeam
