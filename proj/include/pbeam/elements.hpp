#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbeam/diagnostics.hpp"

namespace pbeam {

/// Lagrange basis on the reference interval [0, 1] with equispaced nodes.
class ReferenceBasis {
 public:
  explicit ReferenceBasis(int degree) : degree_(degree) {
    if (degree < 1) throw std::invalid_argument("basis degree must be at least 1");
    if (degree > 3) warn("Lagrange degree " + std::to_string(degree) + " is outside the tested range 1..3");
    nodes_.resize(static_cast<std::size_t>(degree) + 1);
    for (int i = 0; i <= degree; ++i) nodes_[static_cast<std::size_t>(i)] = static_cast<double>(i) / degree;
    nodes_.back() = 1.0;
  }

  [[nodiscard]] int degree() const noexcept { return degree_; }
  [[nodiscard]] std::size_t count() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }

  /// Values of all basis functions at t, evaluated in scalar type T.
  template <typename T>
  void eval(T t, std::span<T> out) const {
    const std::size_t n = count();
    for (std::size_t i = 0; i < n; ++i) {
      T v = T(1);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) v *= (t - node<T>(j)) / (node<T>(i) - node<T>(j));
      }
      out[i] = v;
    }
  }

  /// Derivatives with respect to the reference coordinate t.
  template <typename T>
  void eval_deriv(T t, std::span<T> out) const {
    const std::size_t n = count();
    for (std::size_t i = 0; i < n; ++i) {
      T sum = T(0);
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        T prod = T(1) / (node<T>(i) - node<T>(k));
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i && j != k) prod *= (t - node<T>(j)) / (node<T>(i) - node<T>(j));
        }
        sum += prod;
      }
      out[i] = sum;
    }
  }

  [[nodiscard]] std::vector<double> eval(double t) const {
    std::vector<double> out(count());
    eval<double>(t, out);
    return out;
  }

  [[nodiscard]] std::vector<double> eval_deriv(double t) const {
    std::vector<double> out(count());
    eval_deriv<double>(t, out);
    return out;
  }

 private:
  // Node i as i/degree computed in T, so extended evaluations see exact-to-T nodes.
  template <typename T>
  [[nodiscard]] T node(std::size_t i) const noexcept {
    return static_cast<T>(static_cast<int>(i)) / static_cast<T>(degree_);
  }

  int degree_;
  std::vector<double> nodes_;
};

[[nodiscard]] inline ReferenceBasis make_basis(int degree) { return ReferenceBasis(degree); }

/// Quadrature on [0, 1]; weights sum to one.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  /// Highest polynomial degree integrated exactly.
  [[nodiscard]] int exact_degree() const noexcept { return 2 * static_cast<int>(points.size()) - 1; }
};

namespace detail {

struct Node1D {
  double x;
  double w;
};

// Legendre nodes on [-1, 1] for m > 5; converges to 1e-15 in a handful of steps.
inline std::vector<Node1D> legendre_nodes_newton(int m) {
  std::vector<Node1D> out(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // recompute derivative at the converged node for the weight
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    out[static_cast<std::size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return out;
}

inline std::vector<Node1D> legendre_nodes(int m) {
  switch (m) {
    case 1:
      return {{0.0, 2.0}};
    case 2:
      return {{-0.57735026918962576451, 1.0}, {0.57735026918962576451, 1.0}};
    case 3:
      return {{-0.77459666924148337704, 5.0 / 9.0}, {0.0, 8.0 / 9.0}, {0.77459666924148337704, 5.0 / 9.0}};
    case 4:
      return {{-0.86113631159405257522, 0.34785484513745385737},
              {-0.33998104358485626480, 0.65214515486254614263},
              {0.33998104358485626480, 0.65214515486254614263},
              {0.86113631159405257522, 0.34785484513745385737}};
    case 5:
      return {{-0.90617984593866399280, 0.23692688505618908751},
              {-0.53846931010568309104, 0.47862867049936646804},
              {0.0, 0.56888888888888888889},
              {0.53846931010568309104, 0.47862867049936646804},
              {0.90617984593866399280, 0.23692688505618908751}};
    default:
      return legendre_nodes_newton(m);
  }
}

}  // namespace detail

inline constexpr int kMaxGaussPoints = 20;

/// m-point Gauss-Legendre rule mapped to [0, 1], points ascending.
[[nodiscard]] inline QuadratureRule gauss_rule(int m) {
  if (m < 1 || m > kMaxGaussPoints) {
    throw std::invalid_argument("unsupported Gauss rule size " + std::to_string(m) + " (expected 1.." +
                                std::to_string(kMaxGaussPoints) + ")");
  }
  auto nodes = detail::legendre_nodes(m);
  QuadratureRule rule;
  rule.points.reserve(nodes.size());
  rule.weights.reserve(nodes.size());
  // Newton nodes come out descending; the hardcoded ones ascending.
  if (nodes.front().x > nodes.back().x) std::reverse(nodes.begin(), nodes.end());
  for (const auto& n : nodes) {
    rule.points.push_back(0.5 * (1.0 + n.x));
    rule.weights.push_back(0.5 * n.w);
  }
  return rule;
}

}  // namespace pbeam
